//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest harness so the
//! lines are always printed; exits nonzero when any criterion fails.

use loewner_lab::energy::{arc_driving, dirichlet_energy_driving, loop_energy, LoopParametrization};
use loewner_lab::field_energy::{j_additivity_check, j_energy_area, j_energy_inverse, loop_j_energy, JEstimate, JOptions};
use loewner_lab::loewner::{estimate_driving, loop_from_driving, trace_curve};
use loewner_lab::mobius::Mobius;
use loewner_lab::spectral::{h_functional, h_functional_maps, ConformalMetric, H_CIRCLE};
use loewner_lab::teichmuller::maps::Joukowski;
use loewner_lab::teichmuller::{exterior_term, jordan_maps, liouville_action, DiskQuadOptions, JordanMapsPair, JordanOptions};
use loewner_lab::{Ambient, CurveSamples, DrivingFunction, Root, SlitMapChain, C64};
use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};
use std::f64::consts::PI;
use std::time::Instant;

type Outcome = Result<(bool, String), loewner_lab::Error>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct RandomChain {
    w: DrivingFunction,
    i: f64,
    area: JEstimate,
    inverse: JEstimate,
}

/// Piecewise-linear driving functions on [0, 1] with 8 pieces and energy spread over (0.1, 4).
fn random_chains() -> Result<Vec<RandomChain>, loewner_lab::Error> {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut out = Vec::new();
    for _ in 0..20 {
        let slopes: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let target: f64 = rng.random_range(0.1..4.0);
        let raw: f64 = slopes.iter().map(|s| 0.5 * s * s / 8.0).sum();
        let k = (target / raw).sqrt();
        let mut values = vec![0.0];
        for s in &slopes {
            values.push(values.last().unwrap() + k * s / 8.0);
        }
        let times = (0..=8).map(|j| j as f64 / 8.0).collect();
        let w = DrivingFunction::new(times, values)?;
        let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
        let area = j_energy_area(&chain, JOptions::default())?;
        let inverse = j_energy_inverse(&chain, JOptions::default())?;
        out.push(RandomChain { i: dirichlet_energy_driving(&w), w, area, inverse });
    }
    Ok(out)
}

fn linear_identity(linear: &mut Vec<(f64, JEstimate, JEstimate)>) -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    for lambda in [0.5, 1.0, 2.0] {
        let t0 = Instant::now();
        let w = DrivingFunction::linear(lambda, 1.0);
        let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
        let a = j_energy_area(&chain, JOptions::default())?;
        let v = j_energy_inverse(&chain, JOptions::default())?;
        let secs = t0.elapsed().as_secs_f64();
        let exact = lambda * lambda / 2.0;
        let (ra, rv) = (rel(a.total(), exact), rel(v.total(), exact));
        ok &= ra <= 0.01 && rv <= 0.01 && secs < 60.0;
        msg.push(format!("λ={lambda}: area {:.2e}, inverse {:.2e}, {secs:.1}s", ra, rv));
        linear.push((lambda, a, v));
    }
    Ok((ok, msg.join("; ")))
}

fn zero_case() -> Outcome {
    let w = DrivingFunction::zero(1.0);
    let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
    let i = dirichlet_energy_driving(&w);
    let a = j_energy_area(&chain, JOptions::default())?;
    let v = j_energy_inverse(&chain, JOptions::default())?;
    let curve = trace_curve(&w, 200, Ambient::HalfPlane)?;
    let times = curve.times.clone().unwrap_or_default();
    let dev = curve
        .points
        .iter()
        .zip(&times)
        .map(|(z, t)| (z - C64::new(0.0, 2.0 * t.sqrt())).norm())
        .fold(0.0, f64::max);
    let ok = i == 0.0 && a.value == 0.0 && v.value == 0.0 && times.len() == 201 && dev <= 1e-6;
    Ok((ok, format!("I = {i}, J_area = {}, J_inverse = {}, trace deviation {dev:.2e}", a.value, v.value)))
}

fn j_below_i(set: &[RandomChain]) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for c in set {
        for j in [&c.area, &c.inverse] {
            let excess = j.total() - c.i;
            ok &= excess <= j.bound() + 1e-3 * c.i;
            worst = worst.max(excess / c.i);
        }
    }
    let imax = set.iter().map(|c| c.i).fold(0.0, f64::max);
    Ok((ok, format!("{} chains, I ≤ {imax:.2}, largest (J − I)/I = {worst:.2e}", set.len())))
}

fn j_additivity(set: &[RandomChain]) -> Outcome {
    let mut worst = 0.0f64;
    for c in set {
        let add = j_additivity_check(&c.w, 0.5, JOptions::default())?;
        worst = worst.max(rel(add.rhs(), add.lhs()));
    }
    Ok((worst <= 0.02, format!("split at s = 0.5, largest relative gap {worst:.2e}")))
}

fn inversion(set: &[RandomChain], linear: &[(f64, JEstimate, JEstimate)]) -> Outcome {
    let pairs = set.iter().map(|c| (&c.area, &c.inverse)).chain(linear.iter().map(|(_, a, v)| (a, v)));
    let (mut ok, mut n, mut worst) = (true, 0, 0.0f64);
    for (a, v) in pairs {
        let gap = (a.total() - v.total()).abs();
        let bound = a.bound() + v.bound();
        ok &= gap <= bound;
        worst = worst.max(gap / bound);
        n += 1;
    }
    Ok((ok, format!("{n} chains, largest |J_area − J_inverse| / bound = {worst:.2}")))
}

struct TestLoop {
    a: f64,
    curve: CurveSamples,
    energy: f64,
}

fn test_loops() -> Result<Vec<TestLoop>, loewner_lab::Error> {
    let mut out = Vec::new();
    for a in [0.3, 0.5, 0.8] {
        let w = DrivingFunction::sample(|t| a * (PI * t).sin().powi(2), 1.0, 64)?;
        let curve = loop_from_driving(&w, 200, 1e4)?;
        let energy = loop_energy(&curve, &LoopParametrization::rooted(Root::Infinity))?.value;
        out.push(TestLoop { a, curve, energy });
    }
    Ok(out)
}

fn loop_identity(loops: &[TestLoop]) -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    for l in loops {
        let j = loop_j_energy(&l.curve, &LoopParametrization::rooted(Root::Infinity), JOptions::default())?;
        let r = rel(j.total(), l.energy);
        ok &= r <= 0.02;
        msg.push(format!("a={}: I^L {:.5}, J {:.5}", l.a, l.energy, j.total()));
    }
    Ok((ok, msg.join("; ")))
}

fn liouville_identity(loops: &[TestLoop]) -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    let opts = DiskQuadOptions { tol: 1e-3, ..Default::default() };
    for l in loops {
        let (bounded, _) = l.curve.bounded_image();
        let maps = jordan_maps(&bounded, JordanOptions::default())?;
        let s = liouville_action(&maps, opts)?;
        ok &= rel(s.s1_over_pi, l.energy) <= 0.02;
        msg.push(format!("a={}: I^L {:.5}, S1/π {:.5}", l.a, l.energy, s.s1_over_pi));
    }
    let circle = jordan_maps(&CurveSamples::circle(C64::new(0.3, -0.2), 1.5, 256), JordanOptions::default())?;
    let s0 = liouville_action(&circle, DiskQuadOptions::default())?.s1;
    ok &= s0.abs() <= 1e-6;
    let c = 0.5;
    let (g, _) = exterior_term(&Joukowski { c }, DiskQuadOptions::default())?;
    let exact = -2.0 * PI * (1.0 - c * c).ln();
    ok &= rel(g, exact) <= 1e-3;
    msg.push(format!("S1(circle) {s0:.1e}; Joukowski term {g:.6} vs {exact:.6}"));
    Ok((ok, msg.join("; ")))
}

fn determinant_identity() -> Outcome {
    let exact_circle = h_functional_maps(&JordanMapsPair::circle(C64::new(0.0, 0.0), 1.0), ConformalMetric::patch(), 512)?;
    let det_err = (exact_circle.zeta.det - PI).abs();
    let sampled = h_functional(&CurveSamples::circle(C64::new(0.1, 0.1), 0.8, 256), ConformalMetric::patch(), 128)?;
    let h_err = (sampled.value - H_CIRCLE).abs();
    let ellipse = CurveSamples::joukowski_ellipse(0.2, 200);
    let e = loop_energy(&ellipse, &LoopParametrization::default())?.value;
    let h12 = 12.0 * (h_functional(&ellipse, ConformalMetric::patch(), 64)?.value - H_CIRCLE);
    let mut hs = Vec::new();
    for c in [0.1, 0.2, 0.3, 0.4] {
        hs.push(h_functional(&CurveSamples::joukowski_ellipse(c, 200), ConformalMetric::patch(), 96)?.value);
    }
    let minimal = hs[0] > H_CIRCLE && hs.windows(2).all(|p| p[1] > p[0]);
    let ok = det_err <= 1e-3 && h_err <= 2e-3 && rel(h12, e) <= 0.05 && minimal;
    Ok((
        ok,
        format!(
            "det'(S¹) − π = {det_err:.1e}; H(S¹) + log 2 = {h_err:.1e}; ellipse 12ΔH {h12:.5} vs I^L {e:.5}; ΔH over c = 0.1..0.4: {:?}",
            hs.iter().map(|h| format!("{:.2e}", h - H_CIRCLE)).collect::<Vec<_>>()
        ),
    ))
}

fn invariance_suite() -> Outcome {
    let mut msg = Vec::new();
    let ellipse = CurveSamples::joukowski_ellipse(0.2, 200);
    let moved = ellipse.map(|z| 2.5 * z + C64::new(1.0, -2.0));
    let par = LoopParametrization::default();
    let (i0, i1) = (loop_energy(&ellipse, &par)?.value, loop_energy(&moved, &par)?.value);
    let opts = DiskQuadOptions::default();
    let s0 = liouville_action(&jordan_maps(&ellipse, JordanOptions::default())?, opts)?.s1;
    let s1 = liouville_action(&jordan_maps(&moved, JordanOptions::default())?, opts)?.s1;
    let mut ok = rel(i1, i0) <= 1e-3 && rel(s1, s0) <= 1e-3;
    msg.push(format!("scaling: I {:.1e}, S1 {:.1e}", rel(i1, i0), rel(s1, s0)));

    let circle = CurveSamples::circle(C64::new(0.0, 0.0), 1.0, 256);
    let base = loop_energy(&circle, &par)?.value;
    let family = [
        Mobius::new(C64::new(1.0, 0.0), C64::new(0.3, 0.1), C64::new(0.2, -0.1), C64::new(1.0, 0.0)),
        Mobius::invert_about(C64::new(2.0, 0.5)),
        Mobius::new(C64::new(0.0, 2.0), C64::new(1.0, 0.0), C64::new(-0.4, 0.0), C64::new(1.0, 0.3)),
    ];
    let mut worst = 0.0f64;
    for m in &family {
        let img = circle.mobius_image(m);
        worst = worst.max((loop_energy(&img, &par)?.value - base).abs());
    }
    ok &= worst <= 1e-3;
    msg.push(format!("Möbius circle family: {worst:.1e}"));

    let w = DrivingFunction::sample(|t| 0.6 * (2.0 * t).sin() + 0.3 * t * t, 1.0, 120)?;
    let mut arc = trace_curve(&w, 300, Ambient::HalfPlane)?;
    arc.ambient = Ambient::Plane;
    let anchors: Vec<f64> = [0usize, 40, 150]
        .iter()
        .map(|&k| arc_driving(&arc, &LoopParametrization { anchor_index: k, ..Default::default() }).map(|a| a.energy()))
        .collect::<Result<_, _>>()?;
    let ad = arc_driving(&arc, &LoopParametrization::default())?;
    let re = ad.reparametrize(1.7, 0.05)?.energy();
    let spread = anchors.iter().chain([re].iter()).map(|e| (e - anchors[0]).abs()).fold(0.0, f64::max);
    ok &= spread <= 1e-6;
    msg.push(format!("arc energy over anchors and rescaling: spread {spread:.1e}"));
    Ok((ok, msg.join("; ")))
}

fn roundtrip() -> Outcome {
    let cases: Vec<(&str, DrivingFunction)> = vec![
        ("0.8 sin 3t", DrivingFunction::sample(|t| 0.8 * (3.0 * t).sin(), 1.0, 200)?),
        ("t² − t", DrivingFunction::sample(|t| t * t - t, 1.0, 200)?),
        ("0.5 sin²(πt)", DrivingFunction::sample(|t| 0.5 * (PI * t).sin().powi(2), 1.0, 200)?),
    ];
    let mut ok = true;
    let mut msg = Vec::new();
    for (name, w) in cases {
        let est = estimate_driving(&trace_curve(&w, 1000, Ambient::HalfPlane)?)?;
        let sup = est
            .driving
            .times()
            .iter()
            .zip(est.driving.values())
            .map(|(&t, &v)| (v - w.eval(t)).abs())
            .fold(0.0, f64::max);
        ok &= dirichlet_energy_driving(&w) <= 2.0 && sup <= 1e-2;
        msg.push(format!("{name}: {sup:.1e}"));
    }
    Ok((ok, msg.join("; ")))
}

fn main() {
    // `cargo test -- --list` and filters pass flags through; the suite has no filtering.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut results: Vec<(usize, &str, bool)> = Vec::new();
    let mut report = |n: usize, name: &'static str, r: Outcome| {
        let (pass, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("criterion {n:2} {:4} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        results.push((n, name, pass));
    };

    let mut linear = Vec::new();
    report(1, "linear driving identity", linear_identity(&mut linear));
    report(2, "zero driving", zero_case());
    match random_chains() {
        Ok(set) => {
            report(3, "J bounded by I", j_below_i(&set));
            report(4, "J additivity", j_additivity(&set));
            report(5, "area and inverse routes agree", inversion(&set, &linear));
        }
        Err(e) => {
            for (n, name) in [(3, "J bounded by I"), (4, "J additivity"), (5, "area and inverse routes agree")] {
                report(n, name, Err(loewner_lab::Error::InvalidInput(format!("random chains: {e}"))));
            }
        }
    }
    match test_loops() {
        Ok(loops) => {
            report(6, "loop energy equals loop J", loop_identity(&loops));
            report(7, "loop energy equals S1/π", liouville_identity(&loops));
        }
        Err(e) => {
            report(6, "loop energy equals loop J", Err(loewner_lab::Error::InvalidInput(format!("loops: {e}"))));
            report(7, "loop energy equals S1/π", Err(loewner_lab::Error::InvalidInput(format!("loops: {e}"))));
        }
    }
    report(8, "determinant identity", determinant_identity());
    report(9, "invariances", invariance_suite());
    report(10, "driving roundtrip", roundtrip());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2).map(|r| r.0).collect();
    println!("acceptance: {} of {} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
