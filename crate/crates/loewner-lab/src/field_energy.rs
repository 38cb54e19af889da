//! The J-functional: Dirichlet energy of `σ_h = log|h'|`, by area quadrature of the
//! mapping-out function, by area quadrature of its inverse, and by a boundary Stieltjes sum.

use crate::curve::{CurveSamples, Root};
use crate::driving::DrivingFunction;
use crate::energy::{dirichlet_energy_driving, LoopParametrization};
use crate::error::{Error, Result};
use crate::loewner::{zip_loop, SlitMapChain};
use crate::quadrature::{integrate_1d, integrate_cut, Piece, Polyline, QuadOptions, Rect};
use crate::Ambient;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

/// `σ_h = log|h'|` of a chain with its gradient `|h''/h'|` and conjugate `arg h'`.
pub struct LogDerivField<'a> {
    pub chain: &'a SlitMapChain,
}

impl LogDerivField<'_> {
    pub fn sigma(&self, z: C64) -> Result<f64> {
        Ok(self.chain.h_jet(z, 1)?.d1.norm().ln())
    }

    pub fn grad_norm(&self, z: C64) -> Result<f64> {
        let j = self.chain.h_jet(z, 2)?;
        Ok((j.d2 / j.d1).norm())
    }

    pub fn nu(&self, z: C64) -> Result<f64> {
        Ok(self.chain.h_jet(z, 1)?.d1.arg())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Area,
    Inverse,
    Boundary,
}

#[derive(Clone, Copy, Debug)]
pub struct JOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Truncation radius as a multiple of the hull scale in square-root coordinates.
    pub radius_factor: f64,
    pub order: usize,
    pub max_cells: usize,
}

impl Default for JOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-3, abs_tol: 1e-6, radius_factor: 40.0, order: 5, max_cells: 60_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JEstimate {
    pub method: Method,
    /// Integral over the truncated domain.
    pub value: f64,
    /// Quadrature error estimate.
    pub error_bound: f64,
    /// Estimate of the contribution beyond the truncation radius.
    pub tail_bound: f64,
    pub cells: usize,
    pub skipped: usize,
    pub radius: f64,
}

impl JEstimate {
    fn zero(method: Method) -> Self {
        Self { method, value: 0.0, error_bound: 0.0, tail_bound: 0.0, cells: 0, skipped: 0, radius: 0.0 }
    }

    /// Best point estimate including the tail.
    pub fn total(&self) -> f64 {
        self.value + self.tail_bound
    }

    /// Combined bound on `|total − J|`.
    pub fn bound(&self) -> f64 {
        self.error_bound + self.tail_bound
    }
}

/// Share of the driving energy that may be trimmed off the ends of a chain before integrating.
const TRIM: f64 = 1e-9;

/// Most breakpoints of `W` given their own grid lines or cells.
const KINKS: usize = 32;

fn hull_scale(chain: &SlitMapChain) -> f64 {
    let w = chain.driving();
    let w0 = w.values()[0];
    let spread = w.values().iter().map(|v| (v - w0).abs()).fold(0.0, f64::max);
    2.0 * chain.total_capacity().sqrt() + spread
}

/// `|φ''/φ'|²|2u|²` at `w = u²`, from the inverse flow: `F'/F + F''/F' − 1/u`.
fn inverse_density(core: &SlitMapChain, u: C64) -> Option<f64> {
    let j = core.inverse(u, 2).ok()?;
    Some((j.d1 / j.v + j.d2 / j.d1 - 1.0 / u).norm_sqr())
}

/// Same density for the mapping-out function, `f'/f + f''/f' − 1/u`.
fn forward_density(core: &SlitMapChain, u: C64) -> Option<f64> {
    let j = core.forward(u, 2).ok()?;
    Some((j.d1 / j.v + j.d2 / j.d1 - 1.0 / u).norm_sqr())
}

/// The trace as a polyline in `(r, θ)`. The forward density jumps across it.
fn polar_trace(core: &SlitMapChain, n: usize) -> Result<Polyline> {
    let total = core.total_capacity();
    let mut pts = Vec::with_capacity(n + 1);
    for k in 1..=n {
        // square-root spacing in time keeps the samples roughly even in arclength near the base
        let z = core.tip_at(total * (k as f64 / n as f64).powi(2))?;
        pts.push((z.norm(), z.arg()));
    }
    pts.insert(0, (0.0, pts[0].1));
    let mut marks = Vec::new();
    for k in core.sharpest_breakpoints(KINKS) {
        let z = core.tip_at(core.steps()[..k].iter().map(|s| s.dt).sum())?;
        marks.push((z.norm(), z.arg()));
    }
    Ok(Polyline::new(pts).with_marks(marks))
}

fn polar_integral<D: Fn(C64) -> Option<f64>>(
    chain: &SlitMapChain,
    density: D,
    breaks: &[f64],
    trace: Option<&Polyline>,
    method: Method,
    opts: JOptions,
) -> Result<JEstimate> {
    if chain.is_trivial() {
        return Ok(JEstimate::zero(method));
    }
    let core = chain.energy_core(TRIM);
    let dropped = (dirichlet_energy_driving(&chain.driving()) - dirichlet_energy_driving(&core.driving())).max(0.0);
    let l = hull_scale(&core);
    let radius = opts.radius_factor * l;
    let mut rs = vec![0.0];
    let mut r = l / 16.0;
    while r < radius {
        rs.push(r);
        r *= 2.0;
    }
    rs.push(radius);
    rs.extend(breaks.iter().map(|x| x.abs()).filter(|&x| x > 0.0 && x < radius));
    rs.sort_by(f64::total_cmp);
    rs.dedup_by(|a, b| *a - *b <= 1e-9 * l);
    let ts: Vec<f64> = (0..=8).map(|k| PI * k as f64 / 8.0).collect();
    let cells = Rect::grid(&rs, &ts);
    let f = |r: f64, t: f64| density(C64::from_polar(r, t)).map(|d| d * r / PI);
    let tol = opts.abs_tol + opts.rel_tol * dirichlet_energy_driving(&chain.driving());
    let cut = |c: &Rect| trace.map_or(Piece::Smooth, |t| t.piece(c, 1e-4));
    let q = integrate_cut(&f, &cells, QuadOptions { tol, order: opts.order, max_cells: opts.max_cells }, cut)?;
    let tail = radius * radius / (2.0 * PI)
        * integrate_1d(|t| density(C64::from_polar(radius, t)).unwrap_or(0.0), 0.0, PI, 16, 8);
    Ok(JEstimate {
        method,
        value: q.value,
        error_bound: q.error + dropped,
        tail_bound: tail,
        cells: q.cells.len(),
        skipped: q.skipped,
        radius: radius * radius,
    })
}

/// `J = (1/π)∫_{Σ∖γ}|h''/h'|²`, integrated in square-root coordinates.
pub fn j_energy_area(chain: &SlitMapChain, opts: JOptions) -> Result<JEstimate> {
    let core = chain.energy_core(TRIM);
    if core.steps().is_empty() {
        return Ok(JEstimate::zero(Method::Area));
    }
    let trace = polar_trace(&core, 1024)?;
    polar_integral(chain, |u| forward_density(&core, u), &[], Some(&trace), Method::Area, opts)
}

/// `J = (1/π)∫_Σ|φ''/φ'|²` for the inverse map `φ = h^{-1}`.
pub fn j_energy_inverse(chain: &SlitMapChain, opts: JOptions) -> Result<JEstimate> {
    let core = chain.energy_core(TRIM);
    polar_integral(chain, |u| inverse_density(&core, u), &core.breakpoint_images(&core.sharpest_breakpoints(KINKS))?, None, Method::Inverse, opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct JBoundary {
    pub value: f64,
    /// Net contribution of samples past the tip (the geodesic completion).
    pub completion: f64,
    pub vertices: usize,
}

/// Boundary route: `J = (1/π) Σ (σ_right − σ_left) Δτ` over the vertices of the slit-plane
/// polyline, where `τ` is the tangent angle and the sides are taken with respect to the
/// direction from the base towards the tip.
pub fn j_energy_boundary(chain: &SlitMapChain, curve: &CurveSamples) -> Result<JBoundary> {
    let p: Vec<C64> = match curve.ambient {
        Ambient::SlitPlane => curve.points.clone(),
        Ambient::HalfPlane => curve.points.iter().map(|z| z * z).collect(),
        Ambient::Plane => return Err(Error::InvalidInput("boundary route needs a slit-plane chord".into())),
    };
    if p.len() < 2 {
        return Err(Error::Degenerate("need at least 2 samples".into()));
    }
    if chain.is_trivial() {
        return Ok(JBoundary { value: 0.0, completion: 0.0, vertices: p.len() });
    }
    let total = chain.total_capacity();
    let past_tip = |k: usize| match &curve.times {
        Some(t) => t.get(k).is_some_and(|&t| t > total * (1.0 + 1e-12)),
        None => false,
    };
    let mut dirs = Vec::with_capacity(p.len());
    let mut prev = PI;
    for k in 0..p.len() - 1 {
        let d = p[k + 1] - p[k];
        if d.norm() == 0.0 {
            return Err(Error::TangentUndefined(k));
        }
        let mut a = d.arg();
        while a - prev > PI {
            a -= 2.0 * PI;
        }
        while a - prev < -PI {
            a += 2.0 * PI;
        }
        dirs.push(a);
        prev = a;
    }
    let field = LogDerivField { chain };
    let mut main = Vec::new();
    let mut completion = Vec::new();
    for k in 0..p.len() - 1 {
        let tin = if k == 0 { PI } else { dirs[k - 1] };
        let tout = dirs[k];
        let dtau = tout - tin;
        if dtau == 0.0 {
            continue;
        }
        let len_in = if k == 0 { (p[1] - p[0]).norm() } else { (p[k] - p[k - 1]).norm() };
        let eps = 1e-4 * len_in.min((p[k + 1] - p[k]).norm());
        let normal = C64::from_polar(1.0, 0.5 * (tin + tout) + 0.5 * PI);
        let left = field.sigma(p[k] + eps * normal)?;
        let right = field.sigma(p[k] - eps * normal)?;
        let term = (right - left) * dtau / PI;
        if past_tip(k) {
            completion.push(term);
        } else {
            main.push(term);
        }
    }
    Ok(JBoundary {
        value: crate::energy::pairwise_sum(&main),
        completion: crate::energy::pairwise_sum(&completion),
        vertices: p.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Additivity {
    pub whole: JEstimate,
    pub first: JEstimate,
    pub rest: JEstimate,
}

impl Additivity {
    pub fn lhs(&self) -> f64 {
        self.whole.total()
    }

    pub fn rhs(&self) -> f64 {
        self.first.total() + self.rest.total()
    }

    pub fn bound(&self) -> f64 {
        self.whole.bound() + self.first.bound() + self.rest.bound()
    }
}

/// Compares `J(h_T)` with `J(h_s) + J(h_{T,s})` using the inverse route.
pub fn j_additivity_check(w: &DrivingFunction, s: f64, opts: JOptions) -> Result<Additivity> {
    let total = w.total_capacity();
    if !(s > 0.0 && s < total) {
        return Err(Error::InvalidTime { t: s, total });
    }
    let whole = SlitMapChain::from_driving(w, Ambient::SlitPlane);
    let first = SlitMapChain::from_driving(&w.restrict(0.0, s)?, Ambient::SlitPlane);
    let rest = SlitMapChain::from_driving(&w.restrict(s, total)?, Ambient::SlitPlane);
    Ok(Additivity {
        whole: j_energy_inverse(&whole, opts)?,
        first: j_energy_inverse(&first, opts)?,
        rest: j_energy_inverse(&rest, opts)?,
    })
}

/// J-energy of a loop: the loop is normalized so that its root goes to ∞ and unzipped; the
/// inverse-route integral of the resulting chain is returned.
pub fn loop_j_energy(curve: &CurveSamples, par: &LoopParametrization, opts: JOptions) -> Result<JEstimate> {
    let root = par.root.or(curve.root).or(Some(Root::point(curve.points[0])));
    let zip = zip_loop(curve, root, par.anchor_direction)?;
    j_energy_inverse(&zip.chain, opts)
}
