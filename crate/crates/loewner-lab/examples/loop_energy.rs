//! A loop through ∞ generated by a compactly supported driving function: its loop energy
//! from the unzipped driving function and from the field energy of the normalized map.

use loewner_lab::energy::{dirichlet_energy_driving, loop_energy, LoopParametrization};
use loewner_lab::field_energy::{loop_j_energy, JOptions};
use loewner_lab::loewner::loop_from_driving;
use loewner_lab::{DrivingFunction, Root};
use std::f64::consts::PI;

fn main() -> loewner_lab::Result<()> {
    let w = DrivingFunction::sample(|t| 0.5 * (PI * t).sin().powi(2), 1.0, 64)?;
    let curve = loop_from_driving(&w, 200, 1e4)?;
    let par = LoopParametrization::rooted(Root::Infinity);
    let e = loop_energy(&curve, &par)?;
    let j = loop_j_energy(&curve, &par, JOptions::default())?;
    println!("{} samples", curve.len());
    println!("energy of W:        {:.6}", dirichlet_energy_driving(&w));
    println!("loop energy:        {:.6} ± {:.1e}", e.value, e.error_bar);
    println!("loop field energy:  {:.6} ± {:.1e}", j.total(), j.bound());
    Ok(())
}
