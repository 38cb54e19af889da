use super::flow::{self, Dir, FlowTol};
use crate::curve::Ambient;
use crate::driving::DrivingFunction;
use crate::error::{Error, Result};
use crate::jet::{sqrt_sigma_jet, square_jet, Jet};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// One linear-driving piece: capacity increment and drift of `W` over it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub dt: f64,
    pub dw: f64,
}

impl Step {
    pub fn slope(&self) -> f64 {
        self.dw / self.dt
    }
}

/// Composition of linear-driving slit maps representing `f_T = g_T - W(T)`.
#[derive(Clone, Debug)]
pub struct SlitMapChain {
    steps: Vec<Step>,
    w0: f64,
    ambient: Ambient,
    tol: FlowTol,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn to_jet(y: &[C64; 4]) -> Jet {
    Jet::new(y[0], y[1], y[2], y[3])
}

impl SlitMapChain {
    pub fn new(steps: Vec<Step>, w0: f64, ambient: Ambient) -> Result<Self> {
        if let Some(k) = steps.iter().position(|s| !(s.dt > 0.0) || !s.dw.is_finite()) {
            return Err(Error::InvalidInput(format!("step {k} has non-positive capacity")));
        }
        Ok(Self { steps, w0, ambient, tol: FlowTol::default() })
    }

    pub fn from_driving(w: &DrivingFunction, ambient: Ambient) -> Self {
        let steps = w
            .times()
            .windows(2)
            .zip(w.values().windows(2))
            .map(|(t, v)| Step { dt: t[1] - t[0], dw: v[1] - v[0] })
            .collect();
        Self { steps, w0: w.values()[0], ambient, tol: FlowTol::default() }
    }

    pub fn with_tolerance(mut self, rtol: f64) -> Self {
        self.tol.rtol = rtol;
        self
    }

    pub fn tolerance(&self) -> FlowTol {
        self.tol
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn total_capacity(&self) -> f64 {
        self.steps.iter().map(|s| s.dt).sum()
    }

    pub fn driving(&self) -> DrivingFunction {
        let mut times = vec![0.0];
        let mut values = vec![self.w0];
        for s in &self.steps {
            times.push(times.last().unwrap() + s.dt);
            values.push(values.last().unwrap() + s.dw);
        }
        DrivingFunction::new(times, values).expect("chain steps are positive")
    }

    /// Range of steps carrying non-zero drift, with the capacity before and after it.
    pub fn core_range(&self) -> (usize, usize, f64, f64) {
        let lo = self.steps.iter().position(|s| s.dw != 0.0);
        let Some(lo) = lo else {
            return (0, 0, self.total_capacity(), 0.0);
        };
        let hi = self.steps.iter().rposition(|s| s.dw != 0.0).unwrap() + 1;
        let lead = self.steps[..lo].iter().map(|s| s.dt).sum();
        let tail = self.steps[hi..].iter().map(|s| s.dt).sum();
        (lo, hi, lead, tail)
    }

    /// The chain with leading and trailing zero-drift steps removed. Those only translate `h`.
    pub fn core(&self) -> SlitMapChain {
        let (lo, hi, _, _) = self.core_range();
        SlitMapChain { steps: self.steps[lo..hi].to_vec(), w0: 0.0, ambient: self.ambient, tol: self.tol }
    }

    /// The core with further end steps dropped while their combined Dirichlet energy stays
    /// below `rel` times the total. End pieces only compose `h` with maps of energy at most
    /// their own, so the J-functional moves by at most the dropped energy.
    pub fn energy_core(&self, rel: f64) -> SlitMapChain {
        let core = self.core();
        let e: Vec<f64> = core.steps.iter().map(|s| 0.5 * s.dw * s.dw / s.dt).collect();
        let budget = rel * e.iter().sum::<f64>();
        let (mut lo, mut hi, mut spent) = (0, e.len(), 0.0);
        while lo < hi && spent + e[lo] <= budget / 2.0 {
            spent += e[lo];
            lo += 1;
        }
        let mut spent = 0.0;
        while hi > lo && spent + e[hi - 1] <= budget / 2.0 {
            spent += e[hi - 1];
            hi -= 1;
        }
        SlitMapChain { steps: core.steps[lo..hi].to_vec(), w0: 0.0, ambient: self.ambient, tol: self.tol }
    }

    pub fn is_trivial(&self) -> bool {
        self.steps.iter().all(|s| s.dw == 0.0)
    }

    fn run(&self, y: &mut [C64; 4], order: usize, steps: &[Step], dir: Dir, mut elapsed: f64) -> Result<()> {
        match dir {
            Dir::Forward => {
                for s in steps {
                    flow::integrate(y, order, s.slope(), s.dt, dir, self.tol, elapsed)?;
                    elapsed += s.dt;
                }
            }
            Dir::Reverse => {
                for s in steps.iter().rev() {
                    elapsed -= s.dt;
                    flow::integrate(y, order, s.slope(), s.dt, dir, self.tol, elapsed)?;
                }
            }
        }
        Ok(())
    }

    /// Jet of the centered map `f_T` at `u` (coordinates centered at `W(0)`).
    pub fn forward(&self, u: C64, order: usize) -> Result<Jet> {
        let mut y = [u, one(), zero(), zero()];
        self.run(&mut y, order, &self.steps, Dir::Forward, 0.0)?;
        Ok(to_jet(&y))
    }

    /// Jet of `f_T^{-1}` at `v`.
    pub fn inverse(&self, v: C64, order: usize) -> Result<Jet> {
        let mut y = [v, one(), zero(), zero()];
        self.run(&mut y, order, &self.steps, Dir::Reverse, self.total_capacity())?;
        Ok(to_jet(&y))
    }

    /// Breakpoints of `W` with the largest jumps in slope, at most `max`, as indices of the
    /// step that starts there.
    pub fn sharpest_breakpoints(&self, max: usize) -> Vec<usize> {
        let mut ks: Vec<usize> = (1..self.steps.len()).collect();
        let jump = |k: usize| (self.steps[k].slope() - self.steps[k - 1].slope()).abs();
        ks.sort_by(|a, b| jump(*b).total_cmp(&jump(*a)));
        ks.truncate(max);
        ks.sort();
        ks
    }

    /// Real points where `f_T` sends the two sides of the curve at the base and at the
    /// breakpoints `ks`. The tip goes to 0 and is left out.
    pub fn breakpoint_images(&self, ks: &[usize]) -> Result<Vec<f64>> {
        let eps = 1e-7 * self.total_capacity().sqrt();
        let mut out = Vec::new();
        for k in std::iter::once(0).chain(ks.iter().cloned().filter(|&k| k > 0 && k < self.steps.len())) {
            let elapsed: f64 = self.steps[..k].iter().map(|s| s.dt).sum();
            for side in [-1.0, 1.0] {
                let mut y = [C64::new(side * eps, 0.0), one(), zero(), zero()];
                self.run(&mut y, 0, &self.steps[k..], Dir::Forward, elapsed)?;
                out.push(y[0].re);
            }
        }
        Ok(out)
    }

    /// Splits the steps at capacity `t`.
    pub fn steps_until(&self, t: f64) -> Result<Vec<Step>> {
        let total = self.total_capacity();
        if t < 0.0 || t > total * (1.0 + 1e-12) {
            return Err(Error::InvalidTime { t, total });
        }
        let mut out = Vec::new();
        let mut acc = 0.0;
        for s in &self.steps {
            if acc + s.dt <= t {
                out.push(*s);
                acc += s.dt;
            } else {
                let dt = t - acc;
                if dt > 1e-15 * total {
                    out.push(Step { dt, dw: s.slope() * dt });
                }
                break;
            }
        }
        Ok(out)
    }

    /// `f_t(u)` for `0 ≤ t ≤ T`.
    pub fn forward_until(&self, u: C64, t: f64, order: usize) -> Result<Jet> {
        let steps = self.steps_until(t)?;
        let mut y = [u, one(), zero(), zero()];
        self.run(&mut y, order, &steps, Dir::Forward, 0.0)?;
        Ok(to_jet(&y))
    }

    /// Centered position of the tip `γ_t - W(0)` in the half-plane.
    pub fn tip_at(&self, t: f64) -> Result<C64> {
        let mut steps = self.steps_until(t)?;
        let Some(last) = steps.pop() else {
            return Ok(zero());
        };
        let mut y = [flow::tip(last.slope(), last.dt, self.tol)?, one(), zero(), zero()];
        let elapsed = t - last.dt;
        self.run(&mut y, 0, &steps, Dir::Reverse, elapsed)
            .map_err(|e| Error::TraceDiverged(e.to_string()))?;
        Ok(y[0])
    }

    /// Jet of `h(z) = f_T(√z)^2` on the slit plane.
    pub fn h_jet(&self, z: C64, order: usize) -> Result<Jet> {
        let (lo, hi, lead, tail) = self.core_range();
        let z = z + 4.0 * lead;
        if lo == hi {
            return Ok(Jet::identity(z).add_const(C64::new(4.0 * tail, 0.0)));
        }
        let s = sqrt_sigma_jet(z);
        let mut y = [s.v, one(), zero(), zero()];
        self.run(&mut y, order.max(1), &self.steps[lo..hi], Dir::Forward, lead)
            .map_err(|e| match e {
                Error::FlowSwallowed { .. } => Error::OutsideDomain(format!("{z}")),
                e => e,
            })?;
        let f = to_jet(&y);
        Ok(s.then(&f).then(&square_jet(f.v)).add_const(C64::new(4.0 * tail, 0.0)))
    }

    /// Jet of `φ = h^{-1}`, mapping the slit plane onto the complement of the curve.
    pub fn phi_jet(&self, w: C64, order: usize) -> Result<Jet> {
        let (lo, hi, lead, tail) = self.core_range();
        let w = w - 4.0 * tail;
        if lo == hi {
            return Ok(Jet::identity(w).add_const(C64::new(-4.0 * lead, 0.0)));
        }
        let s = sqrt_sigma_jet(w);
        let mut y = [s.v, one(), zero(), zero()];
        let t_end = self.total_capacity() - tail;
        self.run(&mut y, order.max(1), &self.steps[lo..hi], Dir::Reverse, t_end)?;
        let f = to_jet(&y);
        Ok(s.then(&f).then(&square_jet(f.v)).add_const(C64::new(-4.0 * lead, 0.0)))
    }
}
