//! The chord energy three ways: Dirichlet energy of W, and the field energy J of
//! log|h'| by area quadrature, inverse-map quadrature and the boundary sum.

use loewner_lab::energy::dirichlet_energy_driving;
use loewner_lab::field_energy::{j_energy_area, j_energy_boundary, j_energy_inverse, JOptions};
use loewner_lab::loewner::trace_curve;
use loewner_lab::{Ambient, DrivingFunction, SlitMapChain};

fn main() -> loewner_lab::Result<()> {
    for lambda in [0.5, 1.0, 2.0] {
        let w = DrivingFunction::linear(lambda, 1.0);
        let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
        let opts = JOptions::default();
        let area = j_energy_area(&chain, opts)?;
        let inverse = j_energy_inverse(&chain, opts)?;
        let boundary = j_energy_boundary(&chain, &trace_curve(&w, 1000, Ambient::SlitPlane)?)?;
        println!(
            "λ = {lambda}: I = {:.6}  J_area = {:.6} ± {:.1e}  J_inverse = {:.6} ± {:.1e}  J_boundary = {:.6}",
            dirichlet_energy_driving(&w),
            area.total(),
            area.bound(),
            inverse.total(),
            inverse.bound(),
            boundary.value
        );
    }
    Ok(())
}
