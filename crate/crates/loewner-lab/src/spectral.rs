//! Neumann jump operator across a Jordan curve, zeta-regularized determinants, the `𝓗`
//! functional and conformal anomaly evaluation.

use crate::curve::CurveSamples;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::teichmuller::{jordan_maps, welding_inverse_grid, JordanMapsPair, JordanOptions};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::{LN_2, PI, TAU};

/// Scalar field on the plane with numerical derivatives by default.
pub trait ScalarField: Send + Sync {
    fn value(&self, z: C64) -> f64;

    /// `∂ₓu + i∂ᵧu`.
    fn gradient(&self, z: C64) -> C64 {
        let h = 1e-5 * (1.0 + z.norm());
        let dx = (self.value(z + h) - self.value(z - h)) / (2.0 * h);
        let dy = (self.value(z + C64::new(0.0, h)) - self.value(z - C64::new(0.0, h))) / (2.0 * h);
        C64::new(dx, dy)
    }

    fn laplacian(&self, z: C64) -> f64 {
        let h = 1e-4 * (1.0 + z.norm());
        let c = self.value(z);
        let s = self.value(z + h) + self.value(z - h) + self.value(z + C64::new(0.0, h)) + self.value(z - C64::new(0.0, h));
        (s - 4.0 * c) / (h * h)
    }
}

/// Wraps a closure as a [`ScalarField`].
pub struct FieldFn<F>(pub F);

impl<F: Fn(C64) -> f64 + Send + Sync> ScalarField for FieldFn<F> {
    fn value(&self, z: C64) -> f64 {
        (self.0)(z)
    }
}

/// Metric `e^{2σ}|dz|²` on the plane.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub enum ConformalMetric {
    Euclidean,
    /// Round sphere through stereographic projection, `σ = log(2/(1+|z|²))`.
    Spherical,
    /// Euclidean on `|z| < inner`, spherical on `|z| > outer`, smoothly blended between.
    Patch { inner: f64, outer: f64 },
}

fn spherical_sigma(z: C64) -> f64 {
    (2.0 / (1.0 + z.norm_sqr())).ln()
}

/// Smooth step from 0 at `t ≤ 0` to 1 at `t ≥ 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

impl ConformalMetric {
    /// The standard patch: Euclidean on the disk of radius 2, spherical beyond radius 3.
    pub fn patch() -> Self {
        ConformalMetric::Patch { inner: 2.0, outer: 3.0 }
    }

    pub fn sigma(&self, z: C64) -> f64 {
        match *self {
            ConformalMetric::Euclidean => 0.0,
            ConformalMetric::Spherical => spherical_sigma(z),
            ConformalMetric::Patch { inner, outer } => smooth_step((z.norm() - inner) / (outer - inner)) * spherical_sigma(z),
        }
    }

    /// Radius of the disk about 0 on which `σ ≡ 0`.
    pub fn euclidean_radius(&self) -> f64 {
        match *self {
            ConformalMetric::Euclidean => f64::INFINITY,
            ConformalMetric::Spherical => 0.0,
            ConformalMetric::Patch { inner, .. } => inner,
        }
    }

    /// Gauss curvature `−e^{−2σ}Δσ`.
    pub fn gauss_curvature(&self, z: C64) -> f64 {
        match self {
            ConformalMetric::Euclidean => 0.0,
            ConformalMetric::Spherical => 1.0,
            _ => -(-2.0 * self.sigma(z)).exp() * self.laplacian(z),
        }
    }

    fn require_euclidean_on(&self, maps: &JordanMapsPair, samples: usize) -> Result<()> {
        let r = self.euclidean_radius();
        if r.is_infinite() {
            return Ok(());
        }
        for k in 0..samples {
            let z = maps.f.boundary(TAU * k as f64 / samples as f64)?.v;
            if z.norm() >= r {
                return Err(Error::InvalidInput(format!("curve point {z} lies outside the Euclidean patch |z| < {r}")));
            }
        }
        Ok(())
    }
}

impl ScalarField for ConformalMetric {
    fn value(&self, z: C64) -> f64 {
        self.sigma(z)
    }
}

/// Geodesic curvature of a boundary curve under `e^{2σ}g₀`, from its `g₀` curvature and the
/// outward normal derivative of `σ`.
pub fn geodesic_curvature_conformal(k0: f64, dn_sigma: f64, sigma: f64) -> f64 {
    (-sigma).exp() * (k0 + dn_sigma)
}

/// Sorted positive eigenvalues with the linear model `c⌈k/2⌉` used for regularization.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub zero_modes: usize,
    pub model_slope: f64,
    /// Leading eigenvalues considered resolved; the rest are reported but not summed.
    pub trusted: usize,
}

impl Spectrum {
    /// Model eigenvalue with 1-based index `k`: eigenvalues come in pairs.
    pub fn model(&self, k: usize) -> f64 {
        self.model_slope * k.div_ceil(2) as f64
    }

    /// `log(λ_k/model_k)` over the trusted range.
    pub fn deviations(&self) -> Vec<f64> {
        self.eigenvalues.iter().take(self.trusted).enumerate().map(|(i, l)| (l / self.model(i + 1)).ln()).collect()
    }
}

/// Jump operator `N` in an `L²(ds)`-orthonormalized Fourier basis of the interior angle.
#[derive(Clone, Debug)]
pub struct NeumannJump {
    pub matrix: DMatrix<f64>,
    /// Euclidean length of the curve.
    pub length: f64,
    pub n_modes: usize,
    /// Samples per circle used in assembly.
    pub samples: usize,
}

impl NeumannJump {
    pub fn spectrum(&self) -> Spectrum {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        let max = ev.last().cloned().unwrap_or(0.0).abs();
        let zero_modes = ev.iter().take_while(|l| **l < 1e-9 * max).count();
        let eigenvalues = ev[zero_modes..].to_vec();
        let trusted = (self.n_modes / 2).min(eigenvalues.len());
        Spectrum { eigenvalues, zero_modes, model_slope: 2.0 * TAU / self.length, trusted }
    }

    /// `‖N − Nᵀ‖/‖N‖` in the Frobenius norm.
    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).norm() / self.matrix.norm()
    }
}

/// Real Fourier basis value: index 0 is the constant, then `cos θ, sin θ, cos 2θ, …`.
fn basis(i: usize, t: f64) -> f64 {
    if i == 0 {
        return 1.0;
    }
    let n = i.div_ceil(2) as f64;
    if i % 2 == 1 {
        (n * t).cos()
    } else {
        (n * t).sin()
    }
}

/// Normalized arclength `2π s(t)/l` at `q` equally spaced parameters, from speed samples,
/// integrated spectrally. Also returns the length.
fn arclength_angle(speed: &[f64]) -> (Vec<f64>, f64) {
    let q = speed.len();
    let mut buf: Vec<C64> = speed.iter().map(|&v| C64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(q).process(&mut buf);
    let mean = buf[0].re / q as f64;
    let length = mean * TAU;
    // antiderivative of the zero-mean part
    let mut anti = vec![C64::new(0.0, 0.0); q];
    for k in 1..q {
        let freq = if k <= q / 2 { k as f64 } else { k as f64 - q as f64 };
        if 2 * k == q {
            continue;
        }
        anti[k] = buf[k] / (C64::i() * freq) / q as f64;
    }
    planner.plan_fft_inverse(q).process(&mut anti);
    let base = anti[0].re;
    let sigma = (0..q).map(|j| TAU * j as f64 / q as f64 + (anti[j].re - base) / mean).collect();
    (sigma, length)
}

/// `2π Σ_k |k| Re(a_k conj b_k)` for every pair of basis functions composed with `angle`.
fn dirichlet_form(angle: &[f64], dim: usize) -> DMatrix<f64> {
    let q = angle.len();
    let fft = FftPlanner::new().plan_fft_forward(q);
    let half = q / 2;
    let mut d = DMatrix::<f64>::zeros(2 * half, dim);
    let mut buf = vec![C64::new(0.0, 0.0); q];
    for i in 0..dim {
        for (v, &t) in buf.iter_mut().zip(angle) {
            *v = C64::new(basis(i, t), 0.0);
        }
        fft.process(&mut buf);
        for k in 1..half {
            let c = buf[k] / q as f64 * (4.0 * PI * k as f64).sqrt();
            d[(2 * k, i)] = c.re;
            d[(2 * k + 1, i)] = c.im;
        }
    }
    d.transpose() * d
}

/// Assembles `N` for the curve traced by `maps` with `n_modes` non-constant basis functions.
/// The basis is the Fourier basis in normalized arclength; its Dirichlet forms are computed on
/// the interior circle through `f` and on the exterior circle through `g`, the two
/// parametrizations being aligned by the welding.
pub fn neumann_jump_matrix(maps: &JordanMapsPair, metric: ConformalMetric, n_modes: usize) -> Result<NeumannJump> {
    if n_modes < 16 {
        return Err(Error::InvalidInput(format!("n_modes = {n_modes} is below 16")));
    }
    metric.require_euclidean_on(maps, 256)?;
    let k_max = n_modes / 2;
    let dim = 2 * k_max + 1;
    let q = (16 * k_max).next_power_of_two().max(1024);
    let psi = welding_inverse_grid(maps, 64).map_err(|e| match e {
        Error::MonotonicityViolated(k) => Error::WeldingUnstable(format!("inverse welding not monotone at sample {k}")),
        e => e,
    })?;
    let grid = |k: usize| TAU * k as f64 / q as f64;
    let f_speed = (0..q).map(|j| maps.f.boundary(grid(j)).map(|jt| jt.d1.norm())).collect::<Result<Vec<_>>>()?;
    let g_speed = (0..q).map(|j| maps.g.boundary(grid(j)).map(|jt| jt.d1.norm())).collect::<Result<Vec<_>>>()?;
    let (sf, length) = arclength_angle(&f_speed);
    let (sg, length_g) = arclength_angle(&g_speed);
    if (length - length_g).abs() > 1e-4 * length {
        return Err(Error::WeldingUnstable(format!("interior and exterior traces have lengths {length} and {length_g}")));
    }
    // arclength angle of the interior point welded to the exterior angle 0
    let t0 = psi.phi[0];
    let f_speed0 = |t: f64| maps.f.boundary(t).map(|j| j.d1.norm());
    let mut offset = 0.0;
    {
        let (x, w) = gauss_legendre(16);
        let k0 = (t0.rem_euclid(TAU) / TAU * q as f64).floor() as usize;
        let a = grid(k0);
        let h = 0.5 * (t0.rem_euclid(TAU) - a);
        for (xi, wi) in x.iter().zip(&w) {
            offset += wi * h * f_speed0(a + h * (1.0 + xi))?;
        }
        offset = sf[k0 % q] + offset * TAU / length;
    }
    let sg: Vec<f64> = sg.iter().map(|v| v + offset).collect();
    let a = dirichlet_form(&sf, dim) + dirichlet_form(&sg, dim);
    // mass in the arclength basis: l for the constant, l/2 otherwise
    let scale: Vec<f64> = (0..dim).map(|i| if i == 0 { length } else { 0.5 * length }.sqrt().recip()).collect();
    let m = DMatrix::from_fn(dim, dim, |i, j| a[(i, j)] * scale[i] * scale[j]);
    let matrix = 0.5 * (&m + m.transpose());
    Ok(NeumannJump { matrix, length, n_modes, samples: q })
}

/// `log det′_ζ` and the summed deviations from the model spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct ZetaDet {
    pub log_det: f64,
    pub det: f64,
    /// `Σ log(λ_k/model_k)` over the trusted eigenvalues.
    pub deviation_sum: f64,
    /// Sum of the deviations over the second half of the trusted range.
    pub tail_residual: f64,
}

/// Largest tolerated tail residual in [`zeta_det`].
pub const TAIL_TOLERANCE: f64 = 1e-4;

/// `det′_ζ` by model subtraction: the model `c⌈k/2⌉` has `ζ(s) = 2c^{−s}ζ_R(s)`, so
/// `log det′ = log 2π − log c + Σ log(λ_k/model_k)`.
pub fn zeta_det(spec: &Spectrum) -> Result<ZetaDet> {
    if !(spec.model_slope > 0.0) {
        return Err(Error::InvalidInput("model slope must be positive".into()));
    }
    let dev = spec.deviations();
    let deviation_sum: f64 = dev.iter().sum();
    let tail_residual = dev[dev.len() / 2..].iter().sum::<f64>().abs();
    if !(tail_residual <= TAIL_TOLERANCE) {
        return Err(Error::TailNotConverged { residual: tail_residual });
    }
    let log_det = TAU.ln() - spec.model_slope.ln() + deviation_sum;
    Ok(ZetaDet { log_det, det: log_det.exp(), deviation_sum, tail_residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct HValue {
    pub value: f64,
    pub log_det: f64,
    pub length: f64,
    pub zeta: ZetaDet,
    pub n_modes: usize,
    pub eigenvalues_head: Vec<f64>,
}

/// `𝓗 = log det′_ζ N − log l` for the curve traced by `maps`.
pub fn h_functional_maps(maps: &JordanMapsPair, metric: ConformalMetric, n_modes: usize) -> Result<HValue> {
    let n = neumann_jump_matrix(maps, metric, n_modes)?;
    let spec = n.spectrum();
    let zeta = zeta_det(&spec)?;
    Ok(HValue {
        value: zeta.log_det - n.length.ln(),
        log_det: zeta.log_det,
        length: n.length,
        n_modes,
        eigenvalues_head: spec.eigenvalues.iter().take(16).cloned().collect(),
        zeta,
    })
}

/// `𝓗` of a sampled bounded Jordan curve.
pub fn h_functional(curve: &CurveSamples, metric: ConformalMetric, n_modes: usize) -> Result<HValue> {
    let maps = jordan_maps(curve, JordanOptions::default())?;
    h_functional_maps(&maps, metric, n_modes)
}

/// `−log 2`, the value of `𝓗` on every circle.
pub const H_CIRCLE: f64 = -LN_2;

/// Surface for the conformal anomaly.
pub enum AnomalyDomain<'a> {
    /// Round sphere in the stereographic coordinate, optionally already deformed by `base`.
    Sphere { base: Option<&'a dyn ScalarField> },
    /// Flat disk `|z| < radius` with Dirichlet conditions.
    Disk { radius: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct AnomalyOptions {
    pub polar: usize,
    pub azimuthal: usize,
}

impl Default for AnomalyOptions {
    fn default() -> Self {
        Self { polar: 96, azimuthal: 192 }
    }
}

/// Predicted change of `log det_ζ Δ` when the metric is multiplied by `e^{2σ}`.
///
/// On the sphere `−(1/6π)[½∫|∇σ|² + ∫Kσ] + log vol` differences, taken relative to the base
/// deformation; on the flat disk `−(1/6π)[½∫|∇σ|² + ∮kσ] − (1/4π)∮∂ₙσ`.
pub fn polyakov_alvarez_delta(domain: &AnomalyDomain, sigma: &dyn ScalarField, opts: AnomalyOptions) -> Result<f64> {
    let (x, w) = gauss_legendre(opts.polar);
    let np = opts.azimuthal;
    let mut out = 0.0;
    match domain {
        AnomalyDomain::Sphere { base } => {
            let (mut dir, mut lin, mut cross, mut vol0, mut vol1) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (xi, wi) in x.iter().zip(&w) {
                let th = 0.5 * PI * (1.0 + xi);
                let wt = wi * 0.5 * PI * th.sin() * TAU / np as f64;
                for k in 0..np {
                    let z = C64::from_polar((0.5 * th).tan(), TAU * (k as f64 + 0.5) / np as f64);
                    // Euclidean area per unit round area
                    let jac = (1.0 + z.norm_sqr()).powi(2) / 4.0;
                    let s = sigma.value(z);
                    let g = sigma.gradient(z);
                    let sb = base.map_or(0.0, |b| b.value(z));
                    dir += wt * g.norm_sqr() * jac;
                    lin += wt * s;
                    if let Some(b) = base {
                        let gb = b.gradient(z);
                        cross += wt * (gb.re * g.re + gb.im * g.im) * jac;
                    }
                    vol0 += wt * (2.0 * sb).exp();
                    vol1 += wt * (2.0 * (sb + s)).exp();
                }
            }
            out += -(0.5 * dir + lin + cross) / (6.0 * PI) + vol1.ln() - vol0.ln();
        }
        AnomalyDomain::Disk { radius } => {
            let r0 = *radius;
            let mut dir = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                let r = 0.5 * r0 * (1.0 + xi);
                for k in 0..np {
                    let z = C64::from_polar(r, TAU * (k as f64 + 0.5) / np as f64);
                    dir += wi * 0.5 * r0 * r * TAU / np as f64 * sigma.gradient(z).norm_sqr();
                }
            }
            let (mut bdry, mut flux) = (0.0, 0.0);
            for k in 0..np {
                let u = C64::from_polar(1.0, TAU * (k as f64 + 0.5) / np as f64);
                let ds = r0 * TAU / np as f64;
                bdry += sigma.value(u * r0) / r0 * ds;
                let g = sigma.gradient(u * r0);
                flux += (g.re * u.re + g.im * u.im) * ds;
            }
            out += -(0.5 * dir + bdry) / (6.0 * PI) - flux / (4.0 * PI);
        }
    }
    if !out.is_finite() {
        return Err(Error::QuadratureFailed("anomaly integrand is not finite".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_maps(r: f64) -> JordanMapsPair {
        JordanMapsPair::circle(C64::new(0.0, 0.0), r)
    }

    #[test]
    fn circle_jump_spectrum() {
        let n = neumann_jump_matrix(&circle_maps(1.0), ConformalMetric::patch(), 64).unwrap();
        assert!(n.asymmetry() < 1e-10);
        let s = n.spectrum();
        assert_eq!(s.zero_modes, 1);
        for (i, l) in s.eigenvalues.iter().enumerate() {
            assert!((l - 2.0 * (i / 2 + 1) as f64).abs() < 1e-8, "{i} {l}");
        }
        let s2 = neumann_jump_matrix(&circle_maps(0.5), ConformalMetric::Euclidean, 32).unwrap().spectrum();
        assert!((s2.eigenvalues[4] - 12.0).abs() < 1e-8);
    }

    #[test]
    fn circle_determinant() {
        let n = neumann_jump_matrix(&circle_maps(1.0), ConformalMetric::patch(), 512).unwrap();
        let z = zeta_det(&n.spectrum()).unwrap();
        assert!((z.det - PI).abs() < 1e-3);
        let h = h_functional_maps(&circle_maps(1.5), ConformalMetric::patch(), 64).unwrap();
        assert!((h.value - H_CIRCLE).abs() < 2e-3);
    }

    #[test]
    fn model_spectrum_is_exact() {
        let c = 3.0;
        let spec = Spectrum { eigenvalues: (1..=100).map(|k| c * ((k + 1) / 2) as f64).collect(), zero_modes: 1, model_slope: c, trusted: 100 };
        let z = zeta_det(&spec).unwrap();
        assert_eq!(z.log_det, TAU.ln() - c.ln());
    }

    #[test]
    fn curve_outside_patch_rejected() {
        assert!(neumann_jump_matrix(&circle_maps(2.5), ConformalMetric::patch(), 32).is_err());
    }

    #[test]
    fn anomaly_examples() {
        let o = AnomalyOptions::default();
        let zero = FieldFn(|_: C64| 0.0);
        let sphere = AnomalyDomain::Sphere { base: None };
        assert_eq!(polyakov_alvarez_delta(&sphere, &zero, o).unwrap(), 0.0);
        let c = FieldFn(|_: C64| 0.7);
        let d = polyakov_alvarez_delta(&sphere, &c, o).unwrap();
        assert!((d - 4.0 * 0.7 / 3.0).abs() < 1e-10, "{d}");
        let s1 = FieldFn(|z: C64| 0.3 * (z.re / (1.0 + z.norm_sqr())));
        let s2 = FieldFn(|z: C64| 0.2 / (1.0 + (z - 0.5).norm_sqr()));
        let both = FieldFn(|z: C64| s1.value(z) + s2.value(z));
        let a = polyakov_alvarez_delta(&sphere, &s1, o).unwrap();
        let b = polyakov_alvarez_delta(&AnomalyDomain::Sphere { base: Some(&s1) }, &s2, o).unwrap();
        let ab = polyakov_alvarez_delta(&sphere, &both, o).unwrap();
        assert!((a + b - ab).abs() < 1e-6, "{a} {b} {ab}");
        let disk = AnomalyDomain::Disk { radius: 1.0 };
        assert_eq!(polyakov_alvarez_delta(&disk, &zero, o).unwrap(), 0.0);
    }

    #[test]
    fn geodesic_curvature_examples() {
        assert!((geodesic_curvature_conformal(1.0, 0.0, 3f64.ln()) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(geodesic_curvature_conformal(0.4, 0.0, 0.0), 0.4);
        // latitude circle |z| = r on the round sphere has geodesic curvature cot ϑ, r = tan(ϑ/2)
        let r: f64 = 0.6;
        let m = ConformalMetric::Spherical;
        let z = C64::new(r, 0.0);
        let dn = m.gradient(z).re;
        let k = geodesic_curvature_conformal(1.0 / r, dn, m.sigma(z));
        let th = 2.0 * r.atan();
        assert!((k - 1.0 / th.tan()).abs() < 1e-8);
    }
}
