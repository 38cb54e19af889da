use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Piecewise-linear driving function `W` on `[0, T]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrivingFunction {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl DrivingFunction {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidInput("times and values must be non-empty and of equal length".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidInput(format!("times must start at 0, got {}", times[0])));
        }
        for (k, w) in times.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput(format!("times not strictly increasing at index {}", k + 1)));
            }
        }
        if let Some(k) = values.iter().chain(times.iter()).position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry at index {}", k % times.len())));
        }
        Ok(Self { times, values })
    }

    pub fn zero(total: f64) -> Self {
        Self::linear(0.0, total)
    }

    /// `W(t) = λt` on `[0, T]`.
    pub fn linear(lambda: f64, total: f64) -> Self {
        Self { times: vec![0.0, total], values: vec![0.0, lambda * total] }
    }

    /// Samples `f` at `n + 1` uniformly spaced knots of `[0, T]`.
    pub fn sample<F: Fn(f64) -> f64>(f: F, total: f64, n: usize) -> Result<Self> {
        let n = n.max(1);
        let times: Vec<f64> = (0..=n).map(|k| total * k as f64 / n as f64).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total_capacity(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let ts = &self.times;
        if t <= 0.0 {
            return self.values[0];
        }
        if t >= self.total_capacity() {
            return *self.values.last().unwrap();
        }
        let k = ts.partition_point(|&x| x <= t) - 1;
        let s = (t - ts[k]) / (ts[k + 1] - ts[k]);
        self.values[k] + s * (self.values[k + 1] - self.values[k])
    }

    /// Slopes of the linear pieces.
    pub fn slopes(&self) -> Vec<f64> {
        self.times
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, w)| (w[1] - w[0]) / (t[1] - t[0]))
            .collect()
    }

    /// Restriction to `[s, t]`, re-based to start at time 0.
    pub fn restrict(&self, s: f64, t: f64) -> Result<Self> {
        let total = self.total_capacity();
        if !(0.0 <= s && s < t && t <= total * (1.0 + 1e-15)) {
            return Err(Error::InvalidTime { t: if s < 0.0 { s } else { t }, total });
        }
        let t = t.min(total);
        let mut times = vec![0.0];
        let mut values = vec![self.eval(s)];
        for (&tk, &wk) in self.times.iter().zip(&self.values) {
            if tk > s && tk < t && tk - s > 1e-14 * t && t - tk > 1e-14 * t {
                times.push(tk - s);
                values.push(wk);
            }
        }
        times.push(t - s);
        values.push(self.eval(t));
        Self::new(times, values)
    }

    /// Brownian rescaling `t ↦ λ W(t/λ²)`, which generates the curve scaled by `λ`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            times: self.times.iter().map(|t| t * lambda * lambda).collect(),
            values: self.values.iter().map(|w| w * lambda).collect(),
        }
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self { times: self.times.clone(), values: self.values.iter().map(|w| w + c).collect() }
    }

    /// Continues `W` by a constant on `[T, T + extra]`, i.e. by the conformal geodesic.
    pub fn extend_by_geodesic(&self, extra: f64) -> Self {
        let mut out = self.clone();
        if extra > 0.0 {
            out.times.push(self.total_capacity() + extra);
            out.values.push(*self.values.last().unwrap());
        }
        out
    }

    /// `W̃(t) = W(min(t, T))` evaluated anywhere on `[0, ∞)`.
    pub fn geodesic_eval(&self, t: f64) -> f64 {
        self.eval(t.min(self.total_capacity()))
    }
}
