//! Dirichlet energy of driving functions, arcs and loops.

use crate::curve::{CurveSamples, Root};
use crate::driving::DrivingFunction;
use crate::error::{Error, Result};
use crate::loewner::{zip_loop, zip_rooted, LoopZip};
use crate::mobius::Mobius;
use num_complex::Complex64 as C64;
use serde::Serialize;

/// `I = ½ Σ (Δw/Δt)² Δt`, exact for piecewise-linear `W`.
pub fn dirichlet_energy_driving(w: &DrivingFunction) -> f64 {
    let t = w.times();
    let v = w.values();
    let terms: Vec<f64> = (1..t.len()).map(|k| 0.5 * (v[k] - v[k - 1]).powi(2) / (t[k] - t[k - 1])).collect();
    pairwise_sum(&terms)
}

pub(crate) fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        return x.iter().sum();
    }
    let (a, b) = x.split_at(x.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// `(I(W), I(W|[0,s]) + I(W|[s,T]))`.
pub fn energy_additivity_check(w: &DrivingFunction, s: f64) -> Result<(f64, f64)> {
    let total = w.total_capacity();
    let lhs = dirichlet_energy_driving(w);
    let rhs = dirichlet_energy_driving(&w.restrict(0.0, s)?) + dirichlet_energy_driving(&w.restrict(s, total)?);
    Ok((lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Positive,
    Negative,
}

/// Root and anchor record of a loop or arc driving function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopParametrization {
    pub root: Option<Root>,
    pub orientation: Orientation,
    /// Direction of the ray replacing the first arc, in the picture where the root is at ∞.
    pub anchor_direction: Option<C64>,
    /// Sample index whose capacity time is set to 0.
    pub anchor_index: usize,
}

impl Default for LoopParametrization {
    fn default() -> Self {
        Self { root: None, orientation: Orientation::Positive, anchor_direction: None, anchor_index: 0 }
    }
}

impl LoopParametrization {
    pub fn rooted(root: Root) -> Self {
        Self { root: Some(root), ..Self::default() }
    }
}

/// Driving function of an arc, defined on `[start, start + T]` with `start ≤ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcDriving {
    pub start: f64,
    pub driving: DrivingFunction,
}

impl ArcDriving {
    pub fn eval(&self, t: f64) -> f64 {
        self.driving.eval(t - self.start)
    }

    pub fn energy(&self) -> f64 {
        dirichlet_energy_driving(&self.driving)
    }

    /// `W̃(t) = W(λ²(t + a))/λ − W(λ²a)/λ`.
    pub fn reparametrize(&self, lambda: f64, a: f64) -> Result<ArcDriving> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput("scale must be positive".into()));
        }
        let l2 = lambda * lambda;
        let base = self.eval(l2 * a) / lambda;
        let times: Vec<f64> = self.driving.times().iter().map(|t| t / l2).collect();
        let values: Vec<f64> = self.driving.values().iter().map(|w| w / lambda - base).collect();
        let start = self.start / l2 - a;
        let t0 = times[0];
        Ok(ArcDriving {
            start,
            driving: DrivingFunction::new(times.iter().map(|t| t - t0).collect(), values)?,
        })
    }
}

/// Driving function of an arc seen from its root endpoint.
pub fn arc_driving(curve: &CurveSamples, par: &LoopParametrization) -> Result<ArcDriving> {
    if curve.closed {
        return Err(Error::InvalidInput("arc_driving expects an open arc".into()));
    }
    curve.validate()?;
    let p = &curve.points;
    let scale = curve.max_abs().max(1.0);
    let (mu, pts): (Mobius, Vec<C64>) = match par.root.or(curve.root) {
        Some(Root::Infinity) => (Mobius::identity(), p.clone()),
        Some(Root::Point { re, im }) => {
            let z0 = C64::new(re, im);
            if (p[0] - z0).norm() <= 1e-12 * scale {
                (Mobius::invert_about(z0), p[1..].to_vec())
            } else if (p[p.len() - 1] - z0).norm() <= 1e-12 * scale {
                (Mobius::invert_about(z0), p[..p.len() - 1].iter().rev().copied().collect())
            } else {
                return Err(Error::RootNotEndpoint);
            }
        }
        None => (Mobius::invert_about(p[0]), p[1..].to_vec()),
    };
    let zip = zip_rooted(mu, &pts, par.anchor_direction)?;
    let w = orient(&zip.driving, par.orientation);
    let k = par.anchor_index.min(w.times().len() - 1);
    Ok(ArcDriving { start: -w.times()[k], driving: w })
}

fn orient(w: &DrivingFunction, o: Orientation) -> DrivingFunction {
    match o {
        Orientation::Positive => w.clone(),
        Orientation::Negative => DrivingFunction::new(w.times().to_vec(), w.values().iter().map(|v| -v).collect())
            .expect("same knots"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopEnergy {
    pub value: f64,
    pub error_bar: f64,
    pub samples: usize,
}

/// Loewner loop energy as the Dirichlet energy of the unzipped loop driving function.
/// The error bar compares against the loop resampled at half resolution.
pub fn loop_energy(curve: &CurveSamples, par: &LoopParametrization) -> Result<LoopEnergy> {
    let full = zip_loop(curve, par.root, par.anchor_direction)?;
    let value = dirichlet_energy_driving(&full.driving);
    let error_bar = match half_resolution(curve) {
        Some(half) => match zip_loop(&half, par.root.or(curve.root).or(Some(Root::point(curve.points[0]))), par.anchor_direction) {
            Ok(z) => (dirichlet_energy_driving(&z.driving) - value).abs() / 3.0,
            Err(_) => f64::NAN,
        },
        None => f64::NAN,
    };
    Ok(LoopEnergy { value, error_bar, samples: curve.len() })
}

fn half_resolution(curve: &CurveSamples) -> Option<CurveSamples> {
    if curve.len() < 8 {
        return None;
    }
    let mut c = curve.clone();
    c.points = curve.points.iter().step_by(2).copied().collect();
    c.times = None;
    Some(c)
}

/// Unzips a loop and returns its driving function alongside the normalization data.
pub fn loop_driving(curve: &CurveSamples, par: &LoopParametrization) -> Result<LoopZip> {
    zip_loop(curve, par.root, par.anchor_direction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_sum() {
        let w = DrivingFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(dirichlet_energy_driving(&w), 1.0);
        assert_eq!(energy_additivity_check(&w, 1.0).unwrap(), (1.0, 1.0));
        assert_eq!(dirichlet_energy_driving(&DrivingFunction::zero(3.0)), 0.0);
    }

    #[test]
    fn linear_energy() {
        let w = DrivingFunction::linear(1.5, 2.0);
        assert!((dirichlet_energy_driving(&w) - 1.5 * 1.5 * 2.0 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn reparametrization_keeps_energy() {
        let w = DrivingFunction::new(vec![0.0, 0.5, 1.0, 2.0], vec![0.0, 0.3, -0.4, 0.1]).unwrap();
        let arc = ArcDriving { start: -0.5, driving: w };
        let r = arc.reparametrize(1.7, 0.2).unwrap();
        assert!((r.energy() - arc.energy()).abs() < 1e-12);
        assert!(r.eval(0.0).abs() < 1e-12);
    }
}
