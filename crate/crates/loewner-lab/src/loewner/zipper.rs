//! Zipper-type estimation of driving functions from curve samples, using exact
//! linear-driving slits as elementary steps.

use super::chain::{SlitMapChain, Step};
use super::flow::{self, Dir, FlowTol};
use super::trace_at;
use crate::curve::{Ambient, CurveSamples, Root};
use crate::driving::DrivingFunction;
use crate::error::{Error, Result};
use crate::jet::sqrt_sigma;
use crate::mobius::Mobius;
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Debug)]
pub struct DrivingEstimate {
    pub driving: DrivingFunction,
    /// Largest distance between an input sample and the retraced curve at the same capacity.
    pub hausdorff: f64,
}

/// Result of unzipping a loop: the Σ-chord driving function and the normalization used.
#[derive(Clone, Debug)]
pub struct LoopZip {
    pub driving: DrivingFunction,
    pub chain: SlitMapChain,
    /// Möbius map from the loop's plane to the slit-plane picture `ℝ₊ ∪ chord`.
    pub normalization: Mobius,
    /// Samples of the chord in slit-plane coordinates, starting at 0.
    pub sigma_points: Vec<C64>,
}

/// Finds slope and capacity of the linear-driving slit in ℍ with tip `p`.
fn solve_step(p: C64, tol: FlowTol) -> Result<(f64, f64)> {
    let theta = p.arg();
    let arg_at = |alpha: f64| -> Result<f64> { Ok(flow::unit_tip(alpha.tan(), tol)?.arg()) };
    // arg of the unit tip decreases from π to 0 as the slope runs over ℝ
    let (mut lo, mut hi) = (-FRAC_PI_2 + 1e-9, FRAC_PI_2 - 1e-9);
    let (mut flo, mut fhi) = (arg_at(lo)? - theta, arg_at(hi)? - theta);
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::Degenerate(format!("sample {p} too close to the boundary")));
    }
    // Illinois regula falsi in the angle variable
    let mut side = 0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        x = (lo * fhi - hi * flo) / (fhi - flo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = arg_at(x)? - theta;
        if fx == 0.0 || hi - lo < 1e-15 {
            break;
        }
        if fx > 0.0 {
            lo = x;
            flo = fx;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        } else {
            hi = x;
            fhi = fx;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        }
        if fx.abs() < 1e-15 {
            break;
        }
    }
    let kappa = x.tan();
    let tip = flow::unit_tip(kappa, tol)?;
    let dt = (p.norm() / tip.norm()).powi(2);
    Ok((dt, kappa / dt.sqrt()))
}

/// Unzips a chord of ℍ from 0 through the points `us`.
fn zip_chord(us: &[C64], tol: FlowTol) -> Result<Vec<Step>> {
    let mut pts = us.to_vec();
    let n = pts.len();
    let mut steps = Vec::with_capacity(n);
    for k in 0..n {
        let p = pts[k];
        if !(p.im > 0.0) {
            return Err(Error::NotSimple(k.saturating_sub(1), k));
        }
        // steps are solved at unit scale: z ↦ sz sends (dt, λ) to (s²dt, λ/s)
        let scale = p.norm();
        let (dt, lambda) = solve_step(p / scale, tol)?;
        steps.push(Step { dt: dt * scale * scale, dw: lambda * dt * scale });
        for (j, q) in pts.iter_mut().enumerate().skip(k + 1) {
            let mut y = [*q / scale, C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
            flow::integrate(&mut y, 0, lambda, dt, Dir::Forward, tol, 0.0).map_err(|_| Error::NotSimple(k, j))?;
            *q = y[0] * scale;
        }
    }
    Ok(steps)
}

fn driving_from_steps(steps: &[Step], w0: f64) -> DrivingFunction {
    SlitMapChain::new(steps.to_vec(), w0, Ambient::HalfPlane).expect("positive steps").driving()
}

/// Estimates the driving function of a chord from its samples. The first sample is the
/// boundary anchor: a real point for half-plane chords, 0 for slit-plane chords.
pub fn estimate_driving(curve: &CurveSamples) -> Result<DrivingEstimate> {
    if curve.closed {
        return Err(Error::InvalidInput("closed curves go through the loop pipeline".into()));
    }
    curve.validate()?;
    let p = &curve.points;
    let scale = curve.max_abs().max(1e-300);
    let tol = FlowTol::default();
    let (w0, us): (f64, Vec<C64>) = match curve.ambient {
        Ambient::HalfPlane => {
            if p[0].im.abs() > 1e-12 * scale {
                return Err(Error::InvalidInput("half-plane chord must start on ℝ".into()));
            }
            (p[0].re, p[1..].iter().map(|z| z - p[0].re).collect())
        }
        Ambient::SlitPlane => {
            if p[0].norm() > 1e-12 * scale {
                return Err(Error::InvalidInput("slit-plane chord must start at 0".into()));
            }
            (0.0, p[1..].iter().map(|&z| sqrt_sigma(z)).collect())
        }
        Ambient::Plane => return Err(Error::InvalidInput("plane arcs need a root; use arc_driving".into())),
    };
    let steps = zip_chord(&us, tol)?;
    let driving = driving_from_steps(&steps, w0);
    let chain = SlitMapChain::from_driving(&driving, curve.ambient);
    let retraced = trace_at(&chain, &driving.times()[1..])?;
    let hausdorff = retraced.points.iter().zip(&p[1..]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(DrivingEstimate { driving, hausdorff })
}

/// Reorders loop samples so the root comes first; returns the samples after the root.
fn after_root(curve: &CurveSamples, root: C64) -> Vec<C64> {
    let p = &curve.points;
    let n = p.len();
    let scale = curve.max_abs().max(1.0);
    if let Some(i) = p.iter().position(|z| (z - root).norm() <= 1e-12 * scale) {
        return (1..n).map(|k| p[(i + k) % n]).collect();
    }
    // root inside a segment: start after the closest one
    let dist = |a: C64, b: C64| {
        let d = b - a;
        let t = (((root - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
        (a + t * d - root).norm()
    };
    let i = (0..n).min_by(|&i, &j| dist(p[i], p[(i + 1) % n]).total_cmp(&dist(p[j], p[(j + 1) % n]))).unwrap();
    (1..=n).map(|k| p[(i + k) % n]).collect()
}

/// Unzips a Jordan loop rooted at `root` (default: the curve's root, else its first sample).
/// The arc from the root to the first sample after it is replaced by a straight ray in the
/// inverted picture, leaving in `direction` (default: the continuation of the first segment).
pub fn zip_loop(curve: &CurveSamples, root: Option<Root>, direction: Option<C64>) -> Result<LoopZip> {
    if !curve.closed {
        return Err(Error::NotClosed);
    }
    curve.validate()?;
    let root = root.or(curve.root).unwrap_or(Root::point(curve.points[0]));
    match root {
        Root::Infinity => zip_rooted(Mobius::identity(), &curve.points, direction),
        Root::Point { re, im } => {
            let z0 = C64::new(re, im);
            zip_rooted(Mobius::invert_about(z0), &after_root(curve, z0), direction)
        }
    }
}

/// Unzips the samples `pts` listed in order from the root, after sending the root to ∞ by `mu`.
pub(crate) fn zip_rooted(mu: Mobius, pts: &[C64], direction: Option<C64>) -> Result<LoopZip> {
    let q: Vec<C64> = pts.iter().map(|&z| mu.apply(z)).collect();
    if q.len() < 3 {
        return Err(Error::Degenerate("need at least 3 samples besides the root".into()));
    }
    let d = direction.unwrap_or(q[0] - q[1]);
    if d.norm() == 0.0 || !d.re.is_finite() {
        return Err(Error::Degenerate("ray direction undefined".into()));
    }
    let d = d / d.norm();
    let a = Mobius::affine(1.0 / d, -q[0] / d);
    let normalization = a.compose(&mu);
    let sigma_points: Vec<C64> =
        std::iter::once(C64::new(0.0, 0.0)).chain(q[1..].iter().map(|&z| a.apply(z))).collect();
    let us: Vec<C64> = sigma_points[1..].iter().map(|&z| sqrt_sigma(z)).collect();
    let steps = zip_chord(&us, FlowTol::default())?;
    let chain = SlitMapChain::new(steps, 0.0, Ambient::SlitPlane)?;
    Ok(LoopZip { driving: chain.driving(), chain, normalization, sigma_points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_solver_inverts_tip() {
        for (lambda, dt) in [(0.0, 1.0), (1.0, 0.3), (-2.5, 0.01), (40.0, 1e-3)] {
            let p = flow::tip(lambda, dt, FlowTol::default()).unwrap();
            let (dt2, l2) = solve_step(p, FlowTol::default()).unwrap();
            assert!((dt2 - dt).abs() < 1e-9 * dt, "{dt} {dt2}");
            assert!((l2 - lambda).abs() < 1e-7 * (1.0 + lambda.abs()), "{lambda} {l2}");
        }
    }
}
