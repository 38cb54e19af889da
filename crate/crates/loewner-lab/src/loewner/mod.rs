//! Loewner evolution: forward mapping-out flow, curve tracing, derivatives, inversion and
//! driving-function estimation.

mod chain;
pub mod flow;
mod zipper;

pub use chain::{SlitMapChain, Step};
pub use zipper::{estimate_driving, zip_loop, DrivingEstimate, LoopZip};
pub(crate) use zipper::zip_rooted;

use crate::curve::{Ambient, CurveSamples, Param};
use crate::driving::DrivingFunction;
use crate::error::{Error, Result};
use crate::jet::Jet;
use num_complex::Complex64 as C64;

/// `g_t(z)` for the chain driven by `w`.
pub fn evolve_forward(w: &DrivingFunction, z: C64, t: f64) -> Result<C64> {
    if z.im <= 0.0 {
        return Err(Error::OutsideDomain(format!("{z} is not in the upper half-plane")));
    }
    let chain = SlitMapChain::from_driving(w, Ambient::HalfPlane);
    let f = chain.forward_until(z - w.values()[0], t, 0)?;
    Ok(f.v + w.eval(t))
}

/// Samples `γ` at capacity times `kT/n`, `k = 0..=n`, in the chain's ambient coordinates.
pub fn trace_curve(w: &DrivingFunction, n: usize, ambient: Ambient) -> Result<CurveSamples> {
    if n < 2 {
        return Err(Error::InvalidInput("trace needs at least 2 steps".into()));
    }
    let chain = SlitMapChain::from_driving(w, ambient);
    let total = w.total_capacity();
    let times: Vec<f64> = (0..=n).map(|k| total * k as f64 / n as f64).collect();
    trace_at(&chain, &times)
}

/// Samples `γ` at the given capacity times.
pub fn trace_at(chain: &SlitMapChain, times: &[f64]) -> Result<CurveSamples> {
    let w0 = chain.w0();
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let p = chain.tip_at(t)? + w0;
        if !p.re.is_finite() || !p.im.is_finite() {
            return Err(Error::TraceDiverged(format!("non-finite tip at t = {t}")));
        }
        points.push(match chain.ambient() {
            Ambient::SlitPlane => p * p,
            _ => p,
        });
    }
    Ok(CurveSamples {
        points,
        param: Param::Capacity,
        root: None,
        closed: false,
        ambient: chain.ambient(),
        times: Some(times.to_vec()),
    })
}

/// `(h, h', h'')` of the mapping-out function `h_T(z) = f_T(√z)^2` at `z ∈ Σ`.
pub fn map_out_derivatives(chain: &SlitMapChain, z: C64) -> Result<(C64, C64, C64)> {
    let j = chain.h_jet(z, 2)?;
    if j.d1.norm() == 0.0 || !j.d1.re.is_finite() {
        return Err(Error::OutsideDomain(format!("{z}")));
    }
    Ok((j.v, j.d1, j.d2))
}

/// `φ(w) = h^{-1}(w)`, computed with the reverse flow and polished by damped Newton on `h`.
pub fn invert_map(chain: &SlitMapChain, w: C64) -> Result<C64> {
    if w.im == 0.0 && w.re >= 0.0 {
        return Err(Error::NoConvergence(format!("{w} lies on the slit image")));
    }
    let mut z = match chain.phi_jet(w, 1) {
        Ok(j) => j.v,
        Err(_) => coarse_start(chain, w)?,
    };
    for _ in 0..50 {
        let j: Jet = match chain.h_jet(z, 1) {
            Ok(j) => j,
            Err(_) => return Err(Error::NoConvergence(format!("Newton left the domain at {z}"))),
        };
        let r = j.v - w;
        if r.norm() <= 1e-12 * (1.0 + w.norm()) {
            return Ok(z);
        }
        let step = r / j.d1;
        let mut damp = 1.0;
        loop {
            let trial = z - damp * step;
            if let Ok(jt) = chain.h_jet(trial, 0) {
                if (jt.v - w).norm() < r.norm() {
                    z = trial;
                    break;
                }
            }
            damp *= 0.5;
            if damp < 1e-6 {
                return Ok(z);
            }
        }
    }
    Err(Error::NoConvergence(format!("Newton did not converge for {w}")))
}

fn coarse_start(chain: &SlitMapChain, w: C64) -> Result<C64> {
    let r = (w.norm() + 4.0 * chain.total_capacity()).max(1e-3);
    let mut best: Option<(f64, C64)> = None;
    for i in 1..=12 {
        for j in 0..24 {
            let z = C64::from_polar(r * i as f64 / 6.0, std::f64::consts::TAU * (j as f64 + 0.5) / 24.0);
            if let Ok(h) = chain.h_jet(z, 0) {
                let d = (h.v - w).norm();
                if best.is_none_or(|(b, _)| d < b) {
                    best = Some((d, z));
                }
            }
        }
    }
    best.map(|b| b.1).ok_or_else(|| Error::NoConvergence(format!("no start found for {w}")))
}

/// Continues `W` by the conformal geodesic: `W̃(t) = W(min(t, T))`, kept on `[0, T + extra]`.
pub fn extend_by_geodesic(w: &DrivingFunction, extra: f64) -> DrivingFunction {
    w.extend_by_geodesic(extra)
}

/// Samples of the loop `ℝ₊ ∪ γ ∪ φ(ℝ₋)` through ∞ in slit-plane coordinates, where `γ` is
/// the chord driven by `w` and `φ(ℝ₋)` its completion by the conformal geodesic.
/// `n` capacity samples are taken on `γ`; the two ends are sampled geometrically out to `reach`.
pub fn loop_from_driving(w: &DrivingFunction, n: usize, reach: f64) -> Result<CurveSamples> {
    let w = w.shifted(-w.values()[0]);
    let chord = trace_curve(&w, n.max(2), Ambient::SlitPlane)?;
    let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
    let p = &chord.points;
    let ratio = 1.15f64;
    let mut points = Vec::new();
    let first = p[1].norm();
    let mut x = reach;
    while x > 1.5 * first {
        points.push(C64::new(x, 0.0));
        x /= ratio;
    }
    points.extend_from_slice(p);
    let tip = p[p.len() - 1];
    let d_last = (tip - p[p.len() - 2]).norm();
    let mut s = d_last / chain.phi_jet(C64::new(-d_last, 0.0), 1)?.d1.norm().max(1e-300);
    s *= 0.7;
    while s < reach {
        let z = chain.phi_jet(C64::new(-s, 0.0), 0)?.v;
        if (z - points[points.len() - 1]).norm() > 0.3 * d_last {
            points.push(z);
        }
        s *= ratio;
    }
    let mut c = CurveSamples::closed_loop(points);
    c.root = Some(crate::curve::Root::Infinity);
    Ok(c)
}
