//! Conformal welding of a sampled ellipse: the map g⁻¹∘f on the circle.

use loewner_lab::teichmuller::{jordan_maps, welding, JordanOptions};
use loewner_lab::CurveSamples;

fn main() -> loewner_lab::Result<()> {
    let curve = CurveSamples::joukowski_ellipse(0.3, 300);
    let maps = jordan_maps(&curve, JordanOptions::default())?;
    println!("boundary error of f: {:.2e}", maps.boundary_error.unwrap_or(f64::NAN));
    let w = welding(&maps, 16)?.normalized()?;
    for (t, p) in w.theta.iter().zip(&w.phi) {
        println!("{t:8.5} -> {p:8.5}");
    }
    Ok(())
}
