//! Welding homeomorphism `φ = g⁻¹∘f` on the unit circle.

use super::JordanMapsPair;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::mobius::Mobius;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Sampled circle homeomorphism: `phi[k]` is the lifted image of `theta[k] = 2πk/n`.
#[derive(Clone, Debug, Serialize)]
pub struct WeldingMap {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Hyperbolic density `1/(1 − |z|²)²` on the unit disk.
pub fn hyperbolic_density(z: C64) -> f64 {
    (1.0 - z.norm_sqr()).powi(-2)
}

impl WeldingMap {
    /// Builds a welding from angles in any branch, checking monotonicity and degree one.
    /// The lift starts at the branch nearest to `theta[0]`.
    pub fn from_angles(theta: Vec<f64>, raw: &[f64]) -> Result<Self> {
        let mut phi = Vec::with_capacity(raw.len());
        let mut prev = raw[0] + TAU * ((theta[0] - raw[0]) / TAU).round();
        phi.push(prev);
        for (k, &a) in raw.iter().enumerate().skip(1) {
            let mut d = (a - prev).rem_euclid(TAU);
            if d > PI {
                d -= TAU;
            }
            if d <= 0.0 {
                return Err(Error::MonotonicityViolated(k));
            }
            prev += d;
            phi.push(prev);
        }
        let mut close = (phi[0] + TAU - prev).rem_euclid(TAU);
        if close > PI {
            close -= TAU;
        }
        if close <= 0.0 {
            return Err(Error::MonotonicityViolated(0));
        }
        if ((prev + close - phi[0]) - TAU).abs() > 1e-9 {
            return Err(Error::NumericalWeldFailure("welding does not have degree one".into()));
        }
        Ok(Self { theta, phi })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Periodic linear interpolation of the lift.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.len();
        let x = t.rem_euclid(TAU) / TAU * n as f64;
        let k = (x.floor() as usize).min(n - 1);
        let s = x - k as f64;
        let lo = self.phi[k];
        let hi = if k + 1 < n { self.phi[k + 1] } else { self.phi[0] + TAU };
        lo + s * (hi - lo) + TAU * (t.div_euclid(TAU))
    }

    /// Post-composes with the circle Möbius map fixing the images of `−1, −i, 1`.
    pub fn normalized(&self) -> Result<Self> {
        let at = |t: f64| C64::from_polar(1.0, self.eval(t));
        let m = Mobius::three_point(
            [at(PI), at(1.5 * PI), at(0.0)],
            [C64::new(-1.0, 0.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)],
        );
        let raw: Vec<f64> = self.phi.iter().map(|&p| m.apply(C64::from_polar(1.0, p)).arg()).collect();
        Self::from_angles(self.theta.clone(), &raw)
    }

    /// Largest circular distance between two weldings sampled on the same grid.
    pub fn distance(&self, other: &WeldingMap) -> f64 {
        self.phi
            .iter()
            .zip(&other.phi)
            .map(|(a, b)| {
                let d = (a - b).rem_euclid(TAU);
                d.min(TAU - d)
            })
            .fold(0.0, f64::max)
    }
}

/// Inverts a boundary trace: finds `s` with `trace(s) = z`, starting from a tabulated sample.
fn invert_trace<F: Fn(f64) -> Result<Jet>>(trace: &F, table: &[(f64, C64)], z: C64) -> Result<f64> {
    let scale = table.iter().map(|p| p.1.norm()).fold(0.0, f64::max).max(1e-300);
    let (mut s, _) = *table
        .iter()
        .min_by(|a, b| (a.1 - z).norm().total_cmp(&(b.1 - z).norm()))
        .ok_or_else(|| Error::NumericalWeldFailure("empty table".into()))?;
    let h = TAU / table.len() as f64;
    for _ in 0..60 {
        let j = trace(s)?;
        let t = C64::i() * C64::from_polar(1.0, s) * j.d1;
        let r = z - j.v;
        let along = (r * t.conj()).re / t.norm();
        if along.abs() < 1e-13 * scale {
            return Ok(s);
        }
        let step = (along / t.norm()).clamp(-h, h);
        s += step;
        if step.abs() < 1e-15 {
            return Ok(s);
        }
    }
    let r = (trace(s)?.v - z).norm();
    if r < 1e-6 * scale {
        Ok(s)
    } else {
        Err(Error::NumericalWeldFailure(format!("boundary inversion residual {r:e}")))
    }
}

fn weld<A, B>(src: A, dst: B, n: usize) -> Result<WeldingMap>
where
    A: Fn(f64) -> Result<Jet>,
    B: Fn(f64) -> Result<Jet>,
{
    let m = 4 * n;
    let table = (0..m)
        .map(|k| {
            let s = TAU * k as f64 / m as f64;
            dst(s).map(|j| (s, j.v))
        })
        .collect::<Result<Vec<_>>>()?;
    let theta: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    let raw = theta.iter().map(|&t| invert_trace(&dst, &table, src(t)?.v)).collect::<Result<Vec<_>>>()?;
    WeldingMap::from_angles(theta, &raw)
}

/// `φ = g⁻¹∘f` on `n` equally spaced angles.
pub fn welding(maps: &JordanMapsPair, n: usize) -> Result<WeldingMap> {
    weld(|t| maps.f.boundary(t), |s| maps.g.boundary(s), n)
}

/// `ψ = f⁻¹∘g` on `n` equally spaced angles of the exterior circle.
pub fn welding_inverse_grid(maps: &JordanMapsPair, n: usize) -> Result<WeldingMap> {
    weld(|t| maps.g.boundary(t), |s| maps.f.boundary(s), n)
}
