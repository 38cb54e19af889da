//! Universal Liouville action of an ellipse against its loop energy, and the exterior
//! Joukowski term against its closed form.

use loewner_lab::energy::{loop_energy, LoopParametrization};
use loewner_lab::teichmuller::maps::Joukowski;
use loewner_lab::teichmuller::{exterior_term, jordan_maps, liouville_action, DiskQuadOptions, JordanOptions};
use loewner_lab::CurveSamples;
use std::f64::consts::PI;

fn main() -> loewner_lab::Result<()> {
    let c = 0.5;
    let (g_term, err) = exterior_term(&Joukowski { c }, DiskQuadOptions::default())?;
    println!("Joukowski c = {c}: {g_term:.8} ± {err:.1e}, closed form {:.8}", -2.0 * PI * (1.0 - c * c).ln());

    let curve = CurveSamples::joukowski_ellipse(0.2, 200);
    let maps = jordan_maps(&curve, JordanOptions::default())?;
    let s = liouville_action(&maps, DiskQuadOptions { tol: 1e-4, ..Default::default() })?;
    let e = loop_energy(&curve, &LoopParametrization::default())?;
    println!("ellipse c = 0.2: S1/π = {:.6} ± {:.1e}, loop energy = {:.6}", s.s1_over_pi, s.error_bound / PI, e.value);
    println!("  f term {:.6}, g term {:.6}, log f'(0) {:.6}, log g'(∞) {:.6}", s.f_term, s.g_term, s.log_fp0, s.log_gpinf);
    Ok(())
}
