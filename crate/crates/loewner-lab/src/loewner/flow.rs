//! Adaptive Dormand-Prince integration of the centered Loewner flow with
//! derivative propagation along a single linear-driving segment.

use crate::error::{Error, Result};
use crate::jet::Jet;
use num_complex::Complex64 as C64;

pub const GUARD: f64 = 1e-8;
const MAX_STEPS: usize = 200_000;

#[derive(Clone, Copy, Debug)]
pub struct FlowTol {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for FlowTol {
    fn default() -> Self {
        Self { rtol: 1e-11, atol: 1e-14 }
    }
}

/// Direction of the flow: forward is dv/dt = 2/v - λ, reverse is its negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Forward,
    Reverse,
}

impl Dir {
    fn sign(self) -> f64 {
        match self {
            Dir::Forward => 1.0,
            Dir::Reverse => -1.0,
        }
    }
}

#[inline]
fn rhs(y: &[C64; 4], order: usize, lambda: f64, sg: f64) -> [C64; 4] {
    let r = 1.0 / y[0];
    let mut k = [C64::new(0.0, 0.0); 4];
    k[0] = sg * (2.0 * r - lambda);
    if order >= 1 {
        let r2 = r * r;
        k[1] = sg * (-2.0 * y[1] * r2);
        if order >= 2 {
            let r3 = r2 * r;
            k[2] = sg * (-2.0 * y[2] * r2 + 4.0 * y[1] * y[1] * r3);
            if order >= 3 {
                let a = y[1];
                k[3] = sg * (-2.0 * y[3] * r2 + 12.0 * a * y[2] * r3 - 12.0 * a * a * a * r3 * r);
            }
        }
    }
    k
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates the state `(v, v', v'', v''')` over a segment of length `dt` with slope `lambda`.
/// `order` selects how many derivative components are carried. `elapsed` is used only
/// for error reporting.
pub fn integrate(
    y: &mut [C64; 4],
    order: usize,
    lambda: f64,
    dt: f64,
    dir: Dir,
    tol: FlowTol,
    elapsed: f64,
) -> Result<()> {
    integrate_guarded(y, order, lambda, dt, dir, tol, elapsed, GUARD)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_guarded(
    y: &mut [C64; 4],
    order: usize,
    lambda: f64,
    dt: f64,
    dir: Dir,
    tol: FlowTol,
    elapsed: f64,
    guard: f64,
) -> Result<()> {
    if dt <= 0.0 {
        return Ok(());
    }
    if lambda == 0.0 {
        return constant_segment(y, order, dt, dir, elapsed, guard);
    }
    let sg = dir.sign();
    let n = order + 1;
    let mut t = 0.0;
    let mut h = (0.1 * y[0].norm_sqr()).min(dt);
    let mut k1 = rhs(y, order, lambda, sg);
    let mut steps = 0;
    while t < dt {
        if y[0].norm() < guard {
            return Err(Error::FlowSwallowed { time: elapsed + t, guard });
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::NoConvergence(format!("flow step limit at t = {}", elapsed + t)));
        }
        let last = t + h >= dt * (1.0 - 1e-14);
        if last {
            h = dt - t;
        }
        let mut ks = [[C64::new(0.0, 0.0); 4]; 7];
        ks[0] = k1;
        let mut ynew = *y;
        let mut bad = false;
        for s in 1..7 {
            let mut ys = *y;
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (j, kj) in ks.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ys[i] += h * acc;
            }
            if ys[0].norm() < guard || !ys[0].re.is_finite() || !ys[0].im.is_finite() {
                bad = true;
                break;
            }
            ks[s] = rhs(&ys, order, lambda, sg);
            if s == 6 {
                ynew = ys;
            }
        }
        let err = if bad {
            f64::INFINITY
        } else {
            let mut e: f64 = 0.0;
            for i in 0..n {
                let mut d = C64::new(0.0, 0.0);
                for (s, ks_s) in ks.iter().enumerate() {
                    d += E[s] * ks_s[i];
                }
                let sc = tol.atol + tol.rtol * y[i].norm().max(ynew[i].norm());
                e = e.max((h * d).norm() / sc);
            }
            e
        };
        if err <= 1.0 {
            t = if last { dt } else { t + h };
            *y = ynew;
            k1 = ks[6];
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
            h *= fac;
            if h < 1e-300 {
                return Err(Error::FlowSwallowed { time: elapsed + t, guard });
            }
        }
    }
    if y[0].norm() < guard {
        return Err(Error::FlowSwallowed { time: elapsed + dt, guard });
    }
    Ok(())
}

/// Closed form for zero slope: v -> sqrt(v^2 ± 4 dt).
fn constant_segment(y: &mut [C64; 4], order: usize, dt: f64, dir: Dir, elapsed: f64, guard: f64) -> Result<()> {
    let d = 4.0 * dt * dir.sign();
    let v = y[0];
    let mut q = 1.0 + d / (v * v);
    if q.im == 0.0 && q.re < 0.0 {
        // boundary point on the slit: take the value from its right side
        q.im = -0.0;
    }
    let m = v * q.sqrt();
    if !m.re.is_finite() || !m.im.is_finite() || (order > 0 && m.norm() < guard) {
        return Err(Error::FlowSwallowed { time: elapsed + dt, guard });
    }
    let m3 = m * m * m;
    let outer = Jet::new(m, v / m, d / m3, -3.0 * d * v / (m3 * m * m));
    let inner = Jet::new(v, y[1], y[2], y[3]);
    let j = if order == 0 { Jet::new(m, y[1], y[2], y[3]) } else { inner.then(&outer) };
    *y = [j.v, j.d1, j.d2, j.d3];
    Ok(())
}

/// Tip of the curve generated by slope `lambda` over capacity `dt`, reached by the reverse
/// flow started at the singular point 0.
pub fn tip(lambda: f64, dt: f64, tol: FlowTol) -> Result<C64> {
    if dt <= 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let scale = dt.sqrt();
    Ok(scale * unit_tip(lambda * scale, tol)?)
}

/// Tip at unit capacity for slope `kappa`.
///
/// The reverse flow from the singular point is integrated in the variable `σ = √s`,
/// in which the solution is smooth.
pub fn unit_tip(kappa: f64, tol: FlowTol) -> Result<C64> {
    if kappa == 0.0 {
        return Ok(C64::new(0.0, 2.0));
    }
    let sig0 = 1e-4 / (1.0 + kappa.abs());
    let s0 = sig0 * sig0;
    let v0 = C64::new(0.0, 2.0 * sig0) + (2.0 * kappa / 3.0) * s0
        - C64::new(0.0, kappa * kappa / 18.0) * s0 * sig0;
    dp5_scalar(|sig, v| 2.0 * sig * (kappa - 2.0 / v), v0, sig0, 1.0, tol)
}

/// Dormand-Prince for a scalar complex non-autonomous ODE.
fn dp5_scalar<F: Fn(f64, C64) -> C64>(f: F, mut y: C64, t0: f64, t1: f64, tol: FlowTol) -> Result<C64> {
    const CS: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    let mut t = t0;
    let mut h = (t1 - t0) * 0.01;
    let mut k1 = f(t, y);
    let mut steps = 0;
    while t < t1 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::NoConvergence("tip integration step limit".into()));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let mut ks = [C64::new(0.0, 0.0); 7];
        ks[0] = k1;
        let mut yn = y;
        for st in 1..7 {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..st {
                acc += A[st][j] * ks[j];
            }
            yn = y + h * acc;
            ks[st] = f(t + CS[st] * h, yn);
        }
        let mut d = C64::new(0.0, 0.0);
        for st in 0..7 {
            d += E[st] * ks[st];
        }
        let err = (h * d).norm() / (tol.atol + tol.rtol * y.norm().max(yn.norm()));
        if !err.is_finite() {
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = yn;
            k1 = ks[6];
            h *= if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.5);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_slope_matches_sqrt_flow() {
        let mut y = [C64::new(0.0, 1.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        integrate(&mut y, 3, 0.0, 1.0, Dir::Forward, FlowTol::default(), 0.0).unwrap();
        assert!((y[0] - C64::new(3f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn forward_then_reverse_is_identity() {
        let z = C64::new(0.3, 0.7);
        let mut y = [z, C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        integrate(&mut y, 3, 1.3, 0.4, Dir::Forward, FlowTol::default(), 0.0).unwrap();
        let (a, b, c) = (y[1], y[2], y[3]);
        let mut back = [y[0], C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        integrate(&mut back, 3, 1.3, 0.4, Dir::Reverse, FlowTol::default(), 0.0).unwrap();
        assert!((back[0] - z).norm() < 1e-10);
        // inverse function theorem
        assert!((back[1] * a - 1.0).norm() < 1e-9);
        let expect_b = -b / (a * a * a);
        assert!((back[2] - expect_b).norm() < 1e-8 * expect_b.norm().max(1.0));
        let expect_c = (3.0 * b * b - a * c) / a.powi(5);
        assert!((back[3] - expect_c).norm() < 1e-7 * expect_c.norm().max(1.0));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let z = C64::new(-0.4, 0.5);
        let run = |z: C64| {
            let mut y = [z, C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
            integrate(&mut y, 2, -0.8, 0.3, Dir::Forward, FlowTol::default(), 0.0).unwrap();
            y
        };
        let h = 1e-5;
        let y = run(z);
        let fd = (run(z + h)[0] - run(z - h)[0]) / (2.0 * h);
        let fd2 = (run(z + h)[1] - run(z - h)[1]) / (2.0 * h);
        assert!((fd - y[1]).norm() < 1e-8);
        assert!((fd2 - y[2]).norm() < 1e-6);
    }

    #[test]
    fn tip_of_vertical_slit() {
        let t = tip(1e-14, 1.0, FlowTol::default()).unwrap();
        assert!((t - C64::new(0.0, 2.0)).norm() < 1e-9);
    }

    #[test]
    fn tip_scales_with_capacity() {
        let a = tip(1.0, 1.0, FlowTol::default()).unwrap();
        let b = tip(0.5, 4.0, FlowTol::default()).unwrap();
        assert!((b - 2.0 * a).norm() < 1e-9);
    }
}
