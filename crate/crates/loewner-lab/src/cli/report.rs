//! Cross-method verification rows.

use super::config::Config;
use crate::curve::{Ambient, CurveSamples, Root};
use crate::driving::DrivingFunction;
use crate::energy::{dirichlet_energy_driving, loop_driving, loop_energy, LoopParametrization};
use crate::error::Result;
use crate::field_energy::{j_energy_area, j_energy_boundary, j_energy_inverse, JEstimate};
use crate::loewner::{trace_curve, SlitMapChain};
use crate::spectral::{h_functional_maps, ConformalMetric, H_CIRCLE};
use crate::teichmuller::{jordan_maps, liouville_action, JordanMapsPair, JordanOptions};
use crate::C64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
}

impl From<&JEstimate> for Estimate {
    fn from(j: &JEstimate) -> Self {
        Estimate { value: j.total(), error_bound: j.bound() }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Residual {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Sum of the two methods' error bounds.
    pub error_bound: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Residual {
    pub fn new(check: &str, a: Estimate, b: Estimate, rel: f64, abs: f64) -> Self {
        let residual = (a.value - b.value).abs();
        let eb = |e: f64| if e.is_finite() { e } else { 0.0 };
        let error_bound = eb(a.error_bound) + eb(b.error_bound);
        let tolerance = rel * a.value.abs().max(b.value.abs()) + abs;
        Residual {
            check: check.to_string(),
            lhs: a.value,
            rhs: b.value,
            residual,
            error_bound,
            tolerance,
            pass: residual <= error_bound + tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerifyRow {
    pub input: String,
    pub kind: String,
    pub config_hash: String,
    pub i_driving: Option<Estimate>,
    pub j_area: Option<Estimate>,
    pub j_inverse: Option<Estimate>,
    pub j_boundary: Option<Estimate>,
    pub s1_over_pi: Option<Estimate>,
    pub twelve_delta_h: Option<Estimate>,
    pub h_value: Option<f64>,
    pub residuals: Vec<Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtimes: Option<BTreeMap<String, f64>>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerifyReport {
    pub config_hash: String,
    pub rows: Vec<VerifyRow>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new(config: &Config, rows: Vec<VerifyRow>) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        VerifyReport { config_hash: config.hash(), rows, pass }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One line per residual.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| crate::Error::Io(std::io::Error::other(e));
        w.write_record(["input", "check", "lhs", "rhs", "residual", "error_bound", "tolerance", "pass", "config_hash"])
            .map_err(io)?;
        for row in &self.rows {
            for r in &row.residuals {
                w.write_record([
                    row.input.clone(),
                    r.check.clone(),
                    format!("{:.12e}", r.lhs),
                    format!("{:.12e}", r.rhs),
                    format!("{:.6e}", r.residual),
                    format!("{:.6e}", r.error_bound),
                    format!("{:.6e}", r.tolerance),
                    r.pass.to_string(),
                    row.config_hash.clone(),
                ])
                .map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }
}

struct Clock {
    on: bool,
    times: BTreeMap<String, f64>,
}

impl Clock {
    fn time<T>(&mut self, key: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        let out = f()?;
        if self.on {
            self.times.insert(key.to_string(), t0.elapsed().as_secs_f64());
        }
        Ok(out)
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.on.then_some(self.times)
    }
}

fn row(input: &str, kind: &str, cfg: &Config) -> VerifyRow {
    VerifyRow {
        input: input.to_string(),
        kind: kind.to_string(),
        config_hash: cfg.hash(),
        i_driving: None,
        j_area: None,
        j_inverse: None,
        j_boundary: None,
        s1_over_pi: None,
        twelve_delta_h: None,
        h_value: None,
        residuals: Vec::new(),
        runtimes: None,
        pass: true,
    }
}

/// Row for the chord driven by `w`: `I` against the three `J` routes.
pub fn verify_driving(input: &str, w: &DrivingFunction, cfg: &Config, timings: bool) -> Result<VerifyRow> {
    let mut clock = Clock { on: timings, times: BTreeMap::new() };
    let mut r = row(input, "driving", cfg);
    let w = w.shifted(-w.values()[0]);
    let i = clock.time("i_driving", || Ok(Estimate { value: dirichlet_energy_driving(&w), error_bound: 0.0 }))?;
    let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
    let opts = cfg.j_options();
    let area = clock.time("j_area", || j_energy_area(&chain, opts))?;
    let inverse = clock.time("j_inverse", || j_energy_inverse(&chain, opts))?;
    let boundary = clock.time("j_boundary", || {
        let full = j_energy_boundary(&chain, &trace_curve(&w, cfg.trace_steps, Ambient::SlitPlane)?)?;
        let half = j_energy_boundary(&chain, &trace_curve(&w, (cfg.trace_steps / 2).max(2), Ambient::SlitPlane)?)?;
        Ok(Estimate { value: full.value, error_bound: (full.value - half.value).abs() })
    })?;
    let (a, v) = (Estimate::from(&area), Estimate::from(&inverse));
    let (rel, abs) = (cfg.energy_rel_tol, cfg.j_abs_tol);
    r.residuals = vec![
        Residual::new("I-J_area", i, a, rel, abs),
        Residual::new("I-J_inverse", i, v, rel, abs),
        Residual::new("J_area-J_inverse", a, v, 0.0, abs),
        Residual::new("I-J_boundary", i, boundary, rel, abs),
    ];
    r.i_driving = Some(i);
    r.j_area = Some(a);
    r.j_inverse = Some(v);
    r.j_boundary = Some(boundary);
    r.pass = r.residuals.iter().all(|x| x.pass);
    r.runtimes = clock.finish();
    Ok(r)
}

/// Maps of the curve moved so that its centroid is 0 and its farthest point has modulus 1.
pub fn unit_maps(maps: &JordanMapsPair, curve: &CurveSamples) -> Result<JordanMapsPair> {
    let c = curve.centroid();
    let r = curve.points.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
    maps.affine_image(C64::new(1.0 / r, 0.0), -c / r)
}

/// `12(𝓗 − 𝓗(S¹))` with the difference to half the modes as error bar, plus `𝓗` itself.
pub fn twelve_delta_h(unit: &JordanMapsPair, modes: usize) -> Result<(Estimate, f64)> {
    let full = h_functional_maps(unit, ConformalMetric::patch(), modes)?;
    let half = h_functional_maps(unit, ConformalMetric::patch(), (modes / 2).max(16))?;
    let value = 12.0 * (full.value - H_CIRCLE);
    Ok((Estimate { value, error_bound: 12.0 * (full.value - half.value).abs() }, full.value))
}

/// Row for a Jordan loop: loop energy, both J routes of the unzipped loop, `S₁/π` and `12Δ𝓗`.
pub fn verify_loop(input: &str, curve: &CurveSamples, cfg: &Config, timings: bool) -> Result<VerifyRow> {
    let mut clock = Clock { on: timings, times: BTreeMap::new() };
    let mut r = row(input, "loop", cfg);
    let root = curve.root.unwrap_or(Root::point(curve.points[0]));
    let par = LoopParametrization::rooted(root);
    let i = clock.time("i_driving", || {
        let e = loop_energy(curve, &par)?;
        Ok(Estimate { value: e.value, error_bound: e.error_bar })
    })?;
    let zip = loop_driving(curve, &par)?;
    let opts = cfg.j_options();
    let area = Estimate::from(&clock.time("j_area", || j_energy_area(&zip.chain, opts))?);
    let inverse = Estimate::from(&clock.time("j_inverse", || j_energy_inverse(&zip.chain, opts))?);
    let (rel, abs) = (cfg.energy_rel_tol, cfg.energy_abs_tol);
    r.residuals = vec![
        Residual::new("I-J_area", i, area, rel, abs),
        Residual::new("I-J_inverse", i, inverse, rel, abs),
        Residual::new("J_area-J_inverse", area, inverse, 0.0, abs),
    ];
    r.i_driving = Some(i);
    r.j_area = Some(area);
    r.j_inverse = Some(inverse);
    if !cfg.skip_spectral {
        let (bounded, _) = curve.bounded_image();
        let maps = jordan_maps(&bounded, JordanOptions::default())?;
        let s1 = clock.time("s1", || {
            let la = liouville_action(&maps, cfg.disk_options())?;
            Ok(Estimate { value: la.s1_over_pi, error_bound: la.error_bound / PI })
        })?;
        let unit = unit_maps(&maps, &bounded)?;
        let (h12, h) = clock.time("twelve_delta_h", || twelve_delta_h(&unit, cfg.modes))?;
        r.residuals.push(Residual::new("I-S1_over_pi", i, s1, rel, abs));
        r.residuals.push(Residual::new("I-12dH", i, h12, cfg.det_rel_tol, abs));
        r.residuals.push(Residual::new("S1_over_pi-12dH", s1, h12, cfg.det_rel_tol, abs));
        r.s1_over_pi = Some(s1);
        r.twelve_delta_h = Some(h12);
        r.h_value = Some(h);
    }
    r.pass = r.residuals.iter().all(|x| x.pass);
    r.runtimes = clock.finish();
    Ok(r)
}
