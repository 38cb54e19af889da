//! Zeta-regularized determinant of the Neumann jump operator: the circle, and the
//! energy of an ellipse as 12 times its excess over the circle.

use loewner_lab::spectral::{h_functional, h_functional_maps, ConformalMetric, H_CIRCLE};
use loewner_lab::teichmuller::JordanMapsPair;
use loewner_lab::{CurveSamples, C64};

fn main() -> loewner_lab::Result<()> {
    let circle = h_functional_maps(&JordanMapsPair::circle(C64::new(0.0, 0.0), 1.0), ConformalMetric::patch(), 512)?;
    println!("circle: det' = {:.8} (π = {:.8}), H = {:.8}", circle.zeta.det, std::f64::consts::PI, circle.value);
    println!("  first eigenvalues {:?}", &circle.eigenvalues_head[..6]);

    let ellipse = CurveSamples::joukowski_ellipse(0.2, 200).map(|z| z / 1.2);
    for modes in [32, 64, 128] {
        let h = h_functional(&ellipse, ConformalMetric::patch(), modes)?;
        println!("ellipse c = 0.2, {modes} modes: 12(H - H(S¹)) = {:.6}, tail {:.1e}", 12.0 * (h.value - H_CIRCLE), h.zeta.tail_residual);
    }
    Ok(())
}
