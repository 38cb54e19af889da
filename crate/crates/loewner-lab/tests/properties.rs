use loewner_lab::energy::{arc_driving, dirichlet_energy_driving, loop_energy, ArcDriving, LoopParametrization};
use loewner_lab::field_energy::{j_energy_inverse, JOptions, LogDerivField};
use loewner_lab::loewner::{evolve_forward, trace_curve};
use loewner_lab::mobius::Mobius;
use loewner_lab::spectral::{h_functional_maps, neumann_jump_matrix, ConformalMetric, H_CIRCLE};
use loewner_lab::teichmuller::{jordan_maps, liouville_action, DiskQuadOptions, JordanOptions};
use loewner_lab::{io, Ambient, CurveSamples, DrivingFunction, Root, SlitMapChain, C64};
use proptest::prelude::*;

/// Piecewise-linear driving functions on `[0, T]` starting at 0.
fn driving(max_pieces: usize, max_slope: f64) -> impl Strategy<Value = DrivingFunction> {
    (prop::collection::vec(-max_slope..max_slope, 1..=max_pieces), 0.3..1.5f64).prop_map(|(slopes, total)| {
        let dt = total / slopes.len() as f64;
        let mut values = vec![0.0];
        for s in &slopes {
            values.push(values.last().unwrap() + s * dt);
        }
        let times = (0..=slopes.len()).map(|k| k as f64 * dt).collect();
        DrivingFunction::new(times, values).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_is_a_semigroup(w in driving(6, 2.0), frac in 0.2..0.8f64, x in -2.0..2.0f64, y in 1.0..3.0f64) {
        let total = w.total_capacity();
        let s = frac * total;
        let z = C64::new(x, y);
        let whole = evolve_forward(&w, z, total).unwrap();
        let first = evolve_forward(&w, z, s).unwrap();
        let rest = w.restrict(s, total).unwrap();
        let second = evolve_forward(&rest, first, rest.total_capacity()).unwrap();
        prop_assert!((whole - second).norm() < 1e-8 * (1.0 + whole.norm()), "{whole} {second}");
    }

    #[test]
    fn hydrodynamic_normalization(w in driving(6, 2.0), phase in 0.2..2.9f64) {
        let t = w.total_capacity();
        let err = |r: f64| {
            let z = C64::from_polar(r, phase);
            (evolve_forward(&w, z, t).unwrap() - z - 2.0 * t / z).norm()
        };
        let (a, b) = (err(20.0), err(40.0));
        prop_assert!(b <= 0.3 * a + 1e-12, "{a:e} {b:e}");
    }

    #[test]
    fn brownian_scaling_scales_the_trace(w in driving(5, 2.0), lambda in 0.3..3.0f64) {
        let c = trace_curve(&w, 40, Ambient::HalfPlane).unwrap();
        let d = trace_curve(&w.scaled(lambda), 40, Ambient::HalfPlane).unwrap();
        for (p, q) in c.points.iter().zip(&d.points) {
            prop_assert!((p * lambda - q).norm() < 1e-8 * lambda.max(1.0), "{p} {q}");
        }
    }

    #[test]
    fn log_derivative_is_consistent(w in driving(4, 2.0), x in -3.0..3.0f64, y in 0.5..3.0f64) {
        let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
        let z = C64::new(x, y);
        let j = chain.h_jet(z, 2).unwrap();
        let h = 1e-5;
        let logd = |z: C64| chain.h_jet(z, 1).unwrap().d1.ln();
        let fd = (logd(z + h) - logd(z - h)) / (2.0 * h);
        prop_assert!((fd - j.d2 / j.d1).norm() < 1e-6 * (1.0 + fd.norm()), "{fd} {}", j.d2 / j.d1);
    }

    #[test]
    fn energy_is_nonnegative_and_vanishes_on_constants(w in driving(8, 3.0), c in -2.0..2.0f64) {
        prop_assert!(dirichlet_energy_driving(&w) >= 0.0);
        let constant = DrivingFunction::new(w.times().to_vec(), vec![c; w.times().len()]).unwrap();
        prop_assert_eq!(dirichlet_energy_driving(&constant), 0.0);
    }

    #[test]
    fn reparametrization_keeps_energy(w in driving(8, 3.0), lambda in 0.2..5.0f64, a in -0.1..0.1f64) {
        let arc = ArcDriving { start: -0.1, driving: w };
        let e = arc.energy();
        let r = arc.reparametrize(lambda, a).unwrap().energy();
        prop_assert!((r - e).abs() <= 1e-12 * e.max(1e-300), "{e} {r}");
    }

    #[test]
    fn sigma_is_harmonic(w in driving(4, 2.0), x in -3.0..3.0f64, y in 0.5..3.0f64) {
        let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
        let f = LogDerivField { chain: &chain };
        let z = C64::new(x, y);
        let h = 1e-3;
        let s = |z: C64| f.sigma(z).unwrap();
        let lap = (s(z + h) + s(z - h) + s(z + C64::new(0.0, h)) + s(z - C64::new(0.0, h)) - 4.0 * s(z)) / (h * h);
        prop_assert!(lap.abs() * h * h < 1e-5, "{lap}");
    }

    #[test]
    fn driving_csv_roundtrips(w in driving(12, 5.0)) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        io::write_driving(&p, &w).unwrap();
        let back = io::read_driving(&p).unwrap();
        prop_assert_eq!(back.times(), w.times());
        prop_assert_eq!(back.values(), w.values());
    }

    #[test]
    fn mobius_image_keeps_loop_closed(re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let p = C64::new(re, im);
        prop_assume!((p.norm() - 1.0).abs() > 0.2);
        let c = CurveSamples::circle(C64::new(0.0, 0.0), 1.0, 64);
        let m = Mobius::invert_about(p);
        let img = c.mobius_image(&m);
        prop_assert!(img.closed);
        prop_assert!(img.validate().is_ok());
        // image of a circle is a circle: every sample equidistant from the image of the reflected pole
        let centre = m.apply(1.0 / p.conj());
        let r0 = (img.points[0] - centre).norm();
        prop_assert!(img.points.iter().all(|z| ((z - centre).norm() - r0).abs() < 1e-9 * r0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn j_is_nonnegative_and_below_i(w in driving(5, 2.0)) {
        let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
        let j = j_energy_inverse(&chain, JOptions::default()).unwrap();
        let i = dirichlet_energy_driving(&w);
        prop_assert!(j.value >= 0.0);
        prop_assert!(j.total() <= i + j.bound() + 1e-3 * i, "J {} I {i}", j.total());
    }

    #[test]
    fn refinement_stays_within_error_estimate(w in driving(4, 2.0)) {
        let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
        let coarse = j_energy_inverse(&chain, JOptions { rel_tol: 2e-3, ..Default::default() }).unwrap();
        let fine = j_energy_inverse(&chain, JOptions { rel_tol: 1e-3, ..Default::default() }).unwrap();
        prop_assert!((coarse.value - fine.value).abs() <= coarse.error_bound + fine.error_bound);
    }

    #[test]
    fn jump_operator_is_symmetric_and_stable(c in 0.02..0.35f64) {
        let curve = CurveSamples::joukowski_ellipse(c, 160);
        let maps = jordan_maps(&curve, JordanOptions::default()).unwrap();
        let n32 = neumann_jump_matrix(&maps, ConformalMetric::patch(), 32).unwrap();
        let n64 = neumann_jump_matrix(&maps, ConformalMetric::patch(), 64).unwrap();
        prop_assert!(n64.asymmetry() < 1e-10);
        let (a, b) = (n32.spectrum(), n64.spectrum());
        for k in 0..8 {
            let (x, y) = (a.eigenvalues[k], b.eigenvalues[k]);
            prop_assert!((x - y).abs() <= 1e-6 * y, "mode {k}: {x} {y}");
        }
    }

    #[test]
    fn h_depends_only_on_the_metric_near_the_curve(c in 0.02..0.35f64) {
        let curve = CurveSamples::joukowski_ellipse(c, 160);
        let maps = jordan_maps(&curve, JordanOptions::default()).unwrap();
        let a = h_functional_maps(&maps, ConformalMetric::patch(), 48).unwrap();
        let b = h_functional_maps(&maps, ConformalMetric::Patch { inner: 1.5, outer: 6.0 }, 48).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-12);
        prop_assert!(a.value >= H_CIRCLE);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn liouville_action_is_affine_invariant(c in 0.05..0.3f64, s in 0.3..3.0f64, bx in -2.0..2.0f64, by in -2.0..2.0f64) {
        let curve = CurveSamples::joukowski_ellipse(c, 100);
        let maps = jordan_maps(&curve, JordanOptions::default()).unwrap();
        let opts = DiskQuadOptions { tol: 1e-3, ..Default::default() };
        let a = liouville_action(&maps, opts).unwrap();
        let moved = maps.affine_image(C64::new(s, 0.0), C64::new(bx, by)).unwrap();
        let b = liouville_action(&moved, opts).unwrap();
        prop_assert!(a.s1 > 0.0);
        prop_assert!((a.s1 - b.s1).abs() <= 1e-6 * a.s1, "{} {}", a.s1, b.s1);
    }
}

#[test]
fn circle_loop_energy_vanishes_for_every_root() {
    let c = CurveSamples::circle(C64::new(0.0, 0.0), 1.0, 200);
    for k in [0, 37, 101, 150] {
        let e = loop_energy(&c, &LoopParametrization::rooted(Root::point(c.points[k]))).unwrap();
        assert!(e.value.abs() < 1e-6, "root {k}: {}", e.value);
    }
}

#[test]
fn arc_energy_ignores_anchor() {
    let w = DrivingFunction::sample(|t| 0.5 * (3.0 * t).sin(), 1.0, 80).unwrap();
    let mut arc = trace_curve(&w, 200, Ambient::HalfPlane).unwrap();
    arc.ambient = Ambient::Plane;
    let e: Vec<f64> = [0, 50, 120]
        .iter()
        .map(|&k| arc_driving(&arc, &LoopParametrization { anchor_index: k, ..Default::default() }).unwrap().energy())
        .collect();
    assert!(e.iter().all(|x| (x - e[0]).abs() < 1e-9), "{e:?}");
}
