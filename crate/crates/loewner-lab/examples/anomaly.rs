//! Conformal anomaly of log det Δ under a change of metric e^{2σ}, on the sphere and on a disk.

use loewner_lab::spectral::{polyakov_alvarez_delta, AnomalyDomain, AnomalyOptions, FieldFn};
use loewner_lab::C64;

fn main() -> loewner_lab::Result<()> {
    let o = AnomalyOptions::default();
    let sphere = AnomalyDomain::Sphere { base: None };
    let constant = FieldFn(|_: C64| 0.5);
    println!("sphere, σ = 0.5: {:.8} (4σ/3 = {:.8})", polyakov_alvarez_delta(&sphere, &constant, o)?, 4.0 * 0.5 / 3.0);
    let bump = FieldFn(|z: C64| 0.3 / (1.0 + z.norm_sqr()));
    println!("sphere, bump: {:.8}", polyakov_alvarez_delta(&sphere, &bump, o)?);
    let disk = AnomalyDomain::Disk { radius: 1.0 };
    let linear = FieldFn(|z: C64| 0.2 * z.re);
    println!("unit disk, σ = 0.2x: {:.8}", polyakov_alvarez_delta(&disk, &linear, o)?);
    Ok(())
}
