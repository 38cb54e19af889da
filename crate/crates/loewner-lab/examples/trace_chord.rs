//! Trace the chord of a driving function and recover the driving function from the samples.

use loewner_lab::loewner::{estimate_driving, trace_curve};
use loewner_lab::{Ambient, DrivingFunction};

fn main() -> loewner_lab::Result<()> {
    let w = DrivingFunction::sample(|t| 0.8 * (3.0 * t).sin(), 1.0, 200)?;
    let curve = trace_curve(&w, 400, Ambient::HalfPlane)?;
    let tip = curve.points.last().unwrap();
    println!("tip of the chord at T = 1: {:.6} + {:.6}i", tip.re, tip.im);

    let est = estimate_driving(&curve)?;
    let sup = est
        .driving
        .times()
        .iter()
        .zip(est.driving.values())
        .map(|(&t, &v)| (v - w.eval(t)).abs())
        .fold(0.0, f64::max);
    println!("recovered W: sup error {sup:.2e}, retrace distance {:.2e}", est.hausdorff);
    Ok(())
}
