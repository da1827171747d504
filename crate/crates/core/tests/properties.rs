//! Randomized invariants across modules.

use std::f64::consts::PI;

use proptest::prelude::*;

use hodgebound::bounds::{hodge_bound, ManifoldClass, Regime, RicciConvention};
use hodgebound::dec::DecOperators;
use hodgebound::mesh::{build_eps_net, build_flat_torus, build_icosphere, graph_distances, load_off, write_off};
use hodgebound::spaceform::{
    ball_dirichlet_eigenvalue, ball_dirichlet_eigenvalue_with, model_ball_volume, sphere_volume, BallSolverConfig,
    ModelSpace,
};
use hodgebound::verify::{emit_report, parse_report, quadform_comparison_check, ReportFormat};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn ball_eigenvalue_decreases_with_radius(n in 2usize..5, xi in prop::sample::select(vec![-1.0, 0.0, 1.0]),
                                             r in 0.1f64..2.5, grow in 1.01f64..1.2) {
        let ms = ModelSpace::new(n, xi).unwrap();
        let r2 = r * grow;
        prop_assume!(r2 < ms.radius_cap());
        let a = ball_dirichlet_eigenvalue(&ms, r).unwrap().lambda;
        let b = ball_dirichlet_eigenvalue(&ms, r2).unwrap().lambda;
        prop_assert!(b < a, "r={r} -> {a}, r={r2} -> {b}");
    }

    // Balls of the same radius have larger first eigenvalue in more negative
    // curvature (the hyperbolic one is at least (n-1)²/4).
    #[test]
    fn curvature_orders_ball_eigenvalues(n in 2usize..5, r in 0.1f64..1.5) {
        let l = |xi: f64| ball_dirichlet_eigenvalue(&ModelSpace::new(n, xi).unwrap(), r).unwrap().lambda;
        let (pos, flat, neg) = (l(1.0), l(0.0), l(-1.0));
        prop_assert!(pos < flat && flat < neg, "{pos} {flat} {neg}");
        let m = (n - 1) as f64;
        prop_assert!(neg > m * m / 4.0);
    }

    #[test]
    fn flat_shooting_matches_fast_path(n in 2usize..7, r in 0.2f64..3.0) {
        let ms = ModelSpace::new(n, 0.0).unwrap();
        let fast = ball_dirichlet_eigenvalue(&ms, r).unwrap().lambda;
        let cfg = BallSolverConfig { force_shooting: true, ..BallSolverConfig::default() };
        let shot = ball_dirichlet_eigenvalue_with(&ms, r, &cfg).unwrap().lambda;
        prop_assert!(rel(shot, fast) < 1e-8, "{shot} vs {fast}");
        let scaled = ball_dirichlet_eigenvalue(&ms, 2.0 * r).unwrap().lambda;
        prop_assert!(rel(scaled * 4.0, fast) < 1e-13);
    }

    #[test]
    fn flat_ball_volume_closed_form(n in 2usize..9, r in 0.01f64..10.0) {
        let v = model_ball_volume(&ModelSpace::new(n, 0.0).unwrap(), r).unwrap();
        let want = sphere_volume(n - 1).unwrap() * r.powi(n as i32) / n as f64;
        prop_assert!(rel(v, want) < 1e-12, "{v} vs {want}");
    }

    #[test]
    fn hodge_bound_degree_scaling(n in 2usize..5, d in 0.5f64..8.0, rh in 0.2f64..3.0, k in 1usize..15,
                                  xi in prop::sample::select(vec![-1.0, 0.0])) {
        let mc = ManifoldClass::new(n, xi, RicciConvention::LowerBound).unwrap()
            .with_diameter(d).unwrap().with_rh(rh).unwrap();
        for p in 0..n {
            let a = hodge_bound(&mc, k, p).unwrap();
            let b = hodge_bound(&mc, k, p + 1).unwrap();
            prop_assert_eq!(a.regime, b.regime);
            prop_assert!(rel(b.value.unwrap(), 4.0 * a.value.unwrap()) < 1e-15);
        }
    }

    #[test]
    fn hodge_bound_regime_threshold(d in 0.5f64..8.0, rh in 0.2f64..3.0) {
        let mc = ManifoldClass::new(2, 0.0, RicciConvention::LowerBound).unwrap()
            .with_diameter(d).unwrap().with_rh(rh).unwrap();
        let t = d / (2.0 * rh);
        for k in [t.floor().max(1.0) as usize, t.ceil().max(1.0) as usize] {
            let b = hodge_bound(&mc, k, 0).unwrap();
            prop_assert!(b.value.unwrap().is_finite());
            let expect = if (k as f64) >= t { Regime::LargeK } else { Regime::SmallK };
            prop_assert_eq!(b.regime, expect);
        }
    }

    #[test]
    fn myers_rejects_long_diameters(xi in 0.1f64..4.0, excess in 1.001f64..3.0) {
        let d = excess * PI / xi.sqrt();
        let built = ManifoldClass::new(2, xi, RicciConvention::LowerBound).unwrap().with_diameter(d);
        prop_assert!(built.is_err());
    }

    #[test]
    fn quadform_trials_never_violate(seed in any::<u64>(), d1 in 2usize..7, extra in 0usize..4) {
        let q = quadform_comparison_check(5, d1, d1 + extra, seed).unwrap();
        prop_assert!(q.passed(), "{:?}", q.failures);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn greedy_net_is_monotone(m in 8usize..20, e1 in 0.2f64..2.0, grow in 1.0f64..3.0) {
        let mesh = build_flat_torus(m).unwrap();
        let small = build_eps_net(&mesh, e1).unwrap();
        let large = build_eps_net(&mesh, e1 * grow).unwrap();
        prop_assert!(small.separation_ok && small.covering_ok);
        prop_assert!(small.centers.len() >= large.centers.len());
    }

    #[test]
    fn graph_distance_dominates_chord(a in 0usize..642, b in 0usize..642) {
        let mesh = build_icosphere(3).unwrap();
        let d = graph_distances(&mesh, a).unwrap()[b];
        let (x, y) = (mesh.vertices()[a], mesh.vertices()[b]);
        let chord = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
        prop_assert!(d >= chord * (1.0 - 1e-14));
    }

    #[test]
    fn boundary_of_boundary_vanishes(torus in any::<bool>(), size in 0usize..3) {
        let mesh = if torus { build_flat_torus(3 + 2 * size).unwrap() } else { build_icosphere(size).unwrap() };
        let ops = DecOperators::assemble(&mesh).unwrap();
        let prod = &ops.d1 * &ops.d0;
        prop_assert!(prod.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn off_round_trip(m in 3usize..9) {
        let mesh = build_flat_torus(m).unwrap();
        let ico = build_icosphere(m % 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        for (name, src) in [("torus.off", &mesh), ("ico.off", &ico)] {
            let path = dir.path().join(name);
            write_off(src, &path).unwrap();
            let back = load_off(&path).unwrap();
            prop_assert_eq!(back.triangles(), src.triangles());
            prop_assert_eq!(back.num_edges(), src.num_edges());
        }
    }
}

#[test]
fn report_json_is_a_fixed_point() {
    let mesh = build_flat_torus(6).unwrap();
    let mc = hodgebound::verify::default_class(&mesh).unwrap();
    let opts = hodgebound::verify::MainSuiteOptions { k_max: 6, ..Default::default() };
    let report = hodgebound::verify::check_main_theorem(&mesh, &mc, &opts).unwrap();
    let text = emit_report(&report, ReportFormat::Json).unwrap();
    let again = emit_report(&parse_report(&text).unwrap(), ReportFormat::Json).unwrap();
    assert_eq!(text, again);
}
