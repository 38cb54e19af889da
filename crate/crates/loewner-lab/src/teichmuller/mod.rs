//! Interior and exterior disk maps of bounded Jordan curves, welding, Schwarzian
//! derivatives and the universal Liouville action.

pub mod maps;
mod welding;

pub use maps::{ChainDiskMap, ChainExterior, ChainInterior, CircleMaps, Joukowski, Lens, Rotated};
pub use welding::{hyperbolic_density, welding, welding_inverse_grid, WeldingMap};

use crate::curve::{CurveSamples, Root};
use crate::error::{Error, Result};
use crate::jet::{recip_jet, Jet};
use crate::loewner::{zip_loop, LoopZip};
use crate::mobius::Mobius;
use rustfft::FftPlanner;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

/// Radius used for boundary evaluation, just inside the unit circle.
const RIM: f64 = 1.0 - 1e-9;

/// Relative tolerance of the slit-map flows behind chain-based disk maps.
const MAP_RTOL: f64 = 1e-9;

/// Conformal map of the unit disk onto the bounded component.
pub trait InteriorMap: Send + Sync {
    fn jet(&self, z: C64) -> Result<Jet>;

    /// Boundary value and derivatives at `e^{iθ}`.
    fn boundary(&self, theta: f64) -> Result<Jet> {
        self.jet(C64::from_polar(RIM, theta))
    }
}

/// Conformal map `g` of the exterior disk onto the unbounded component with `g(∞) = ∞`,
/// represented through `Ĝ(ξ) = 1/g(1/ξ)` on the unit disk.
pub trait ExteriorMap: Send + Sync {
    fn inverted_jet(&self, xi: C64) -> Result<Jet>;

    /// Jet of `g` itself at `|ζ| > 1`.
    fn jet(&self, zeta: C64) -> Result<Jet> {
        let r = recip_jet(zeta);
        let gh = r.then(&self.inverted_jet(r.v)?);
        Ok(gh.then(&recip_jet(gh.v)))
    }

    /// Boundary value of `g` at `e^{iθ}`.
    fn boundary(&self, theta: f64) -> Result<Jet> {
        self.jet(C64::from_polar(1.0 / RIM, theta))
    }
}

/// Interior and exterior maps of a bounded Jordan curve.
#[derive(Clone)]
pub struct JordanMapsPair {
    pub f: Arc<dyn InteriorMap>,
    pub g: Arc<dyn ExteriorMap>,
    /// `f(0)`.
    pub f_center: C64,
    /// `|f'(0)|`.
    pub f_prime_0: f64,
    /// `|g'(∞)| = 1/|Ĝ'(0)|`.
    pub g_prime_inf: f64,
    /// Largest distance from sampled `f(S¹)` to the input polyline, when built from samples.
    pub boundary_error: Option<f64>,
}

impl std::fmt::Debug for JordanMapsPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JordanMapsPair")
            .field("f_center", &self.f_center)
            .field("f_prime_0", &self.f_prime_0)
            .field("g_prime_inf", &self.g_prime_inf)
            .field("boundary_error", &self.boundary_error)
            .finish()
    }
}

impl JordanMapsPair {
    pub fn new(f: Arc<dyn InteriorMap>, g: Arc<dyn ExteriorMap>) -> Result<Self> {
        let j = f.jet(C64::new(0.0, 0.0))?;
        let gh = g.inverted_jet(C64::new(0.0, 0.0))?;
        Ok(Self { f, g, f_center: j.v, f_prime_0: j.d1.norm(), g_prime_inf: 1.0 / gh.d1.norm(), boundary_error: None })
    }

    pub fn circle(center: C64, radius: f64) -> Self {
        let m = Arc::new(CircleMaps { center, radius });
        Self::new(m.clone(), m).expect("closed form")
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct JordanOptions {
    /// Interior point sent to `f(0)`; the centroid by default.
    pub center: Option<C64>,
    /// Argument of `f'(0)`; 0 by default.
    pub f_phase: Option<f64>,
    /// Post-compose with the affine map giving `f(0) = 0`, `f'(0) = 1`.
    pub normalize: bool,
}

/// Builds `(f, g)` for a bounded Jordan curve by unzipping it and composing the resulting
/// chain with Möbius maps. `g'(∞)` is made positive.
pub fn jordan_maps(curve: &CurveSamples, opts: JordanOptions) -> Result<JordanMapsPair> {
    if !curve.closed {
        return Err(Error::NotJordan("curve is not closed".into()));
    }
    if matches!(curve.root, Some(Root::Infinity)) {
        return Err(Error::NotJordan("curve passes through ∞".into()));
    }
    // rooting at a sample keeps the unzipped points away from the ends of the chord
    let zip = zip_loop(curve, Some(Root::point(curve.points[0])), None).map_err(|e| match e {
        Error::NotSimple(i, j) => Error::NotJordan(format!("segments {i} and {j} cross")),
        e => e,
    })?;
    let center = opts.center.unwrap_or_else(|| curve.centroid());
    if curve.winding_number(center) == 0 {
        return Err(Error::NotJordan(format!("center {center} is not inside the curve")));
    }
    let mut maps = from_loop_zip(&zip, center, opts.f_phase.unwrap_or(0.0))?;
    if opts.normalize {
        maps = maps.normalized()?;
    }
    maps.boundary_error = Some(boundary_error(&maps, curve, 512)?);
    Ok(maps)
}

/// Builds `(f, g)` from an unzipped loop; `center` must lie in the bounded component.
pub fn from_loop_zip(zip: &LoopZip, center: C64, f_phase: f64) -> Result<JordanMapsPair> {
    let n0 = zip.normalization;
    let m = n0.inverse();
    let p_inf = n0.image_of_infinity().ok_or_else(|| Error::NotJordan("unzipping fixed ∞".into()))?;
    let w_inf = zip.chain.h_jet(p_inf, 0)?.v;
    let a1 = zip.chain.h_jet(n0.apply(center), 0)?.v;
    if w_inf.im * a1.im >= 0.0 {
        return Err(Error::NotJordan("center and ∞ fall on the same side".into()));
    }
    let half = |a: C64, r: C64| Mobius::new(-a.conj() * r, a, -r, C64::new(1.0, 0.0));
    let recip_m = Mobius::new(m.c, m.d, m.a, m.b);
    let chain = zip.chain.clone().with_tolerance(MAP_RTOL);
    let build_f = |r: C64| ChainInterior(ChainDiskMap { chain: chain.clone(), to_half_plane: half(a1, r), to_plane: m });
    let build_g = |r: C64| ChainExterior(ChainDiskMap { chain: chain.clone(), to_half_plane: half(w_inf, r), to_plane: recip_m });
    let one = C64::new(1.0, 0.0);
    let fp = build_f(one).jet(C64::new(0.0, 0.0))?.d1;
    let gp = build_g(one).inverted_jet(C64::new(0.0, 0.0))?.d1;
    let rf = C64::from_polar(1.0, f_phase - fp.arg());
    let rg = C64::from_polar(1.0, -gp.arg());
    JordanMapsPair::new(Arc::new(build_f(rf)), Arc::new(build_g(rg)))
}

struct PostAffine<M: ?Sized> {
    inner: Arc<M>,
    a: C64,
    b: C64,
}

impl InteriorMap for PostAffine<dyn InteriorMap> {
    fn jet(&self, z: C64) -> Result<Jet> {
        Ok(self.inner.jet(z)?.scale(self.a).add_const(self.b))
    }
}

impl ExteriorMap for PostAffine<dyn ExteriorMap> {
    fn inverted_jet(&self, xi: C64) -> Result<Jet> {
        // 1/(a g + b) in terms of Ĝ = 1/g: Ĝ/(a + bĜ)
        let j = self.inner.inverted_jet(xi)?;
        let m = Mobius::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), self.b, self.a);
        Ok(j.then(&m.jet(j.v)))
    }
}

impl JordanMapsPair {
    /// Post-composes both maps with `z ↦ az + b`.
    pub fn affine_image(&self, a: C64, b: C64) -> Result<Self> {
        let f: Arc<dyn InteriorMap> = Arc::new(PostAffine { inner: self.f.clone(), a, b });
        let g: Arc<dyn ExteriorMap> = Arc::new(PostAffine { inner: self.g.clone(), a, b });
        JordanMapsPair::new(f, g)
    }

    /// The pair moved so that `f(0) = 0` and `f'(0) = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let fp = self.f.jet(C64::new(0.0, 0.0))?.d1;
        self.affine_image(1.0 / fp, -self.f_center / fp)
    }
}

/// Maximum distance from `f(e^{iθ})` at `n` angles to the polyline of `curve`.
pub fn boundary_error(maps: &JordanMapsPair, curve: &CurveSamples, n: usize) -> Result<f64> {
    let p = &curve.points;
    let m = p.len();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let z = maps.f.boundary(TAU * (k as f64 + 0.5) / n as f64)?.v;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let (a, b) = (p[i], p[(i + 1) % m]);
            let d = b - a;
            let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            best = best.min((a + t * d - z).norm());
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Schwarzian derivative `f'''/f' − (3/2)(f''/f')²` of an interior map.
pub fn schwarzian(map: &dyn InteriorMap, z: C64) -> Result<C64> {
    let j = map.jet(z)?;
    if j.d1.norm() < 1e-300 || !j.d3.re.is_finite() {
        return Err(Error::DerivativeUnstable(format!("{z}")));
    }
    Ok(j.schwarzian())
}

#[derive(Clone, Copy, Debug)]
pub struct DiskQuadOptions {
    /// Relative tolerance on each integral.
    pub tol: f64,
    /// Absolute floor on the error of each integral.
    pub abs_tol: f64,
    /// Largest number of samples on one circle.
    pub max_samples: usize,
}

impl Default for DiskQuadOptions {
    fn default() -> Self {
        Self { tol: 1e-5, abs_tol: 1e-9, max_samples: 1 << 20 }
    }
}

/// Taylor coefficients `a_m`, `m < n/2`, of a function analytic in the disk, from `n` samples
/// on `|z| = ρ`.
pub fn taylor_coefficients<F: Fn(C64) -> Result<C64>>(f: &F, rho: f64, n: usize) -> Result<Vec<C64>> {
    let mut buf = (0..n).map(|k| f(C64::from_polar(rho, TAU * k as f64 / n as f64))).collect::<Result<Vec<_>>>()?;
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut scale = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n / 2);
    for c in buf.iter().take(n / 2) {
        out.push(c * scale);
        scale /= rho;
    }
    Ok(out)
}

fn samples_for(rho: f64) -> usize {
    (32.0 / (1.0 - rho)).max(64.0).log2().ceil().exp2() as usize
}

/// `∫_{|z|<1} |F|² dA` for `F` analytic in the disk. Truncated integrals over `|z| < 1 − 2^{-k}`
/// come from Taylor coefficients on one circle; their increments are extrapolated geometrically.
fn disk_integral<F: Fn(C64) -> Result<C64>>(f: F, opts: DiskQuadOptions) -> Result<(f64, f64)> {
    let mut depth = 8;
    loop {
        let rho = 1.0 - 0.5f64.powi(depth);
        let n = samples_for(rho);
        if n > opts.max_samples {
            return Err(Error::IntegralDiverging(format!("no convergence with {} samples per circle", opts.max_samples)));
        }
        let a = taylor_coefficients(&f, rho, n)?;
        let partial = |r: f64| -> f64 {
            let r2 = r * r;
            let mut p = r2;
            let mut s = 0.0;
            for (m, c) in a.iter().enumerate() {
                s += c.norm_sqr() * p / (m + 1) as f64;
                p *= r2;
            }
            PI * s
        };
        let values: Vec<f64> = (1..=depth).map(|k| partial(1.0 - 0.5f64.powi(k))).collect();
        let value = *values.last().unwrap();
        let inc: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let k = inc.len();
        let last = inc[k - 1];
        if last.abs() <= 1e-14 * value.abs() + 1e-20 {
            return Ok((value, last.abs()));
        }
        if k >= 3 && last.abs() + inc[k - 2].abs() <= opts.abs_tol {
            return Ok((value, last.abs() + inc[k - 2].abs()));
        }
        if k >= 3 {
            let r1 = last / inc[k - 2];
            let r0 = inc[k - 2] / inc[k - 3];
            if r1 > 0.0 && r1 < 0.75 {
                let tail = last * r1 / (1.0 - r1);
                let err = last.abs() * (r1 - r0).abs() / (1.0 - r1).powi(2);
                if err <= opts.tol * (value + tail).abs() + opts.abs_tol {
                    return Ok((value + tail, err));
                }
            }
        }
        depth += 1;
    }
}

/// `∫_{|z|<ρ} |F|²(1 − |z|²)² dA` for each `ρ` in `radii`, from Taylor coefficients on the
/// largest circle.
fn weighted_disk_integrals<F: Fn(C64) -> Result<C64>>(f: F, radii: &[f64], opts: DiskQuadOptions) -> Result<Vec<f64>> {
    let rho = radii.iter().cloned().fold(0.0, f64::max);
    let n = samples_for(rho).min(opts.max_samples);
    let a = taylor_coefficients(&f, rho, n)?;
    Ok(radii
        .iter()
        .map(|&r| {
            let u = r * r;
            let mut p = u;
            let mut s = 0.0;
            for (m, c) in a.iter().enumerate() {
                let m = m as f64;
                // ∫_0^r t^{2m+1}(1−t²)² dt
                let w = 0.5 * p * (1.0 / (m + 1.0) - 2.0 * u / (m + 2.0) + u * u / (m + 3.0));
                s += c.norm_sqr() * w;
                p *= u;
            }
            TAU * s
        })
        .collect())
}

fn exterior_density(j: &Jet, xi: C64) -> C64 {
    j.d2 / j.d1 - 2.0 * j.d1 / j.v + 2.0 / xi
}

#[derive(Clone, Debug, Serialize)]
pub struct LiouvilleAction {
    pub s1: f64,
    pub s1_over_pi: f64,
    pub f_term: f64,
    pub g_term: f64,
    pub log_fp0: f64,
    pub log_gpinf: f64,
    pub error_bound: f64,
}

/// `∫_𝔻|f''/f'|² + ∫_{𝔻*}|g''/g'|² + 4π log|f'(0)| − 4π log|g'(∞)|`.
pub fn liouville_action(maps: &JordanMapsPair, opts: DiskQuadOptions) -> Result<LiouvilleAction> {
    let (f_term, ef) = disk_integral(|z| maps.f.jet(z).map(|j| j.d2 / j.d1), opts)?;
    let (g_term, eg) = exterior_term(maps.g.as_ref(), opts)?;
    let log_fp0 = maps.f_prime_0.ln();
    let log_gpinf = maps.g_prime_inf.ln();
    let s1 = f_term + g_term + 4.0 * PI * (log_fp0 - log_gpinf);
    Ok(LiouvilleAction { s1, s1_over_pi: s1 / PI, f_term, g_term, log_fp0, log_gpinf, error_bound: ef + eg })
}

/// `∫_{𝔻*}|g''/g'|²`, computed on the unit disk through `Ĝ`.
pub fn exterior_term(g: &dyn ExteriorMap, opts: DiskQuadOptions) -> Result<(f64, f64)> {
    disk_integral(|xi| g.inverted_jet(xi).map(|j| exterior_density(&j, xi)), opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct WpDiagnostic {
    pub value_f: f64,
    pub value_g: f64,
    pub diverging_f: bool,
    pub diverging_g: bool,
    /// Truncation depths `δ` used (integrals over `|z| < 1 − δ`).
    pub cutoffs: Vec<f64>,
    pub partial_f: Vec<f64>,
    pub partial_g: Vec<f64>,
}

fn diverging(partial: &[f64]) -> bool {
    let n = partial.len();
    if n < 3 {
        return false;
    }
    let d1 = partial[n - 2] - partial[n - 3];
    let d2 = partial[n - 1] - partial[n - 2];
    d2 > 0.5 * d1.abs() && d2 > 1e-3 * partial[n - 1].abs()
}

/// Weighted Schwarzian integrals `∫|S|²(1−|z|²)²` on both sides, with a divergence flag
/// raised when the contributions of successive boundary layers stop shrinking.
pub fn wp_diagnostic_schwarzian(maps: &JordanMapsPair, opts: DiskQuadOptions) -> Result<WpDiagnostic> {
    let cutoffs = vec![1e-1, 1e-2, 1e-3, 1e-4];
    let radii: Vec<f64> = cutoffs.iter().map(|d| 1.0 - d).collect();
    let partial_f = weighted_disk_integrals(|z| maps.f.jet(z).map(|j| j.schwarzian()), &radii, opts)?;
    let partial_g = weighted_disk_integrals(|z| maps.g.inverted_jet(z).map(|j| j.schwarzian()), &radii, opts)?;
    Ok(WpDiagnostic {
        value_f: *partial_f.last().unwrap(),
        value_g: *partial_g.last().unwrap(),
        diverging_f: diverging(&partial_f),
        diverging_g: diverging(&partial_g),
        cutoffs,
        partial_f,
        partial_g,
    })
}
