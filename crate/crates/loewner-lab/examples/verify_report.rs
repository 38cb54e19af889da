//! Build a verification report in code, as the `verify` subcommand does.

use loewner_lab::cli::{report, Config, VerifyReport};
use loewner_lab::DrivingFunction;

fn main() -> loewner_lab::Result<()> {
    let cfg = Config { skip_spectral: true, ..Config::default() };
    let rows = vec![
        report::verify_driving("linear:1", &DrivingFunction::linear(1.0, 1.0), &cfg, false)?,
        report::verify_driving("sine", &DrivingFunction::sample(|t| (4.0 * t).sin() / 2.0, 1.0, 100)?, &cfg, false)?,
    ];
    let rep = VerifyReport::new(&cfg, rows);
    print!("{}", rep.to_csv()?);
    println!("all pass: {}", rep.pass);
    Ok(())
}
