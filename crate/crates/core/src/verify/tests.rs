use super::*;
use crate::bounds::SOURCE_HODGE;
use crate::mesh::{build_flat_torus, build_icosphere};

fn dense() -> SolverConfig {
    SolverConfig { method: Some(SolveMethod::Dense), ..SolverConfig::default() }
}

#[test]
fn torus_class_defaults() {
    let mc = default_class(&build_flat_torus(8).unwrap()).unwrap();
    assert_eq!((mc.n, mc.xi, mc.rh, mc.r0), (2, 0.0, Some(PI), Some(PI)));
    assert!((mc.diameter.unwrap() - 2f64.sqrt() * PI).abs() < 1e-15);
    let sphere = default_class(&build_icosphere(1).unwrap()).unwrap();
    assert_eq!(sphere.xi, 1.0);
    assert_eq!(hypothesis_warnings(&build_flat_torus(8).unwrap(), &mc), Vec::<String>::new());
}

#[test]
fn main_suite_on_small_torus() {
    let mesh = build_flat_torus(16).unwrap();
    let mc = default_class(&mesh).unwrap();
    let opts = MainSuiteOptions { k_max: 10, ..MainSuiteOptions::default() };
    let r = check_main_theorem(&mesh, &mc, &opts).unwrap();
    assert_eq!(r.rows.len(), 10 * 3 * 2);
    assert!(r.all_pass());
    assert!(r.rows.iter().all(|row| row.margin.unwrap() > 0.0));
    assert_eq!(r.diagnostics.kernel_dims["p1"], 2);
    let first = r.rows.iter().find(|x| x.k == 1 && x.p == 0 && x.source == SOURCE_HODGE).unwrap();
    assert!((first.bound.unwrap() - 2.343837).abs() < 1e-5);
    // coarse mesh: deviation is recorded and flagged
    assert!(r.diagnostics.reference_deviation.unwrap() > 0.0);
    for k in 1..=10 {
        for p in 0..3 {
            let pick = |src: &str| r.rows.iter().find(|x| x.k == k && x.p == p && x.source == src).unwrap().bound.unwrap();
            assert!(pick("Cor 3.3") >= pick(SOURCE_HODGE) * (1.0 - 1e-12));
        }
    }
}

#[test]
fn both_index_conventions_are_reported() {
    let mesh = build_flat_torus(12).unwrap();
    let mc = default_class(&mesh).unwrap();
    let opts = MainSuiteOptions { k_max: 4, p_list: vec![1], include_closed_form: false, ..MainSuiteOptions::default() };
    let r = check_main_theorem(&mesh, &mc, &opts).unwrap();
    for row in &r.rows {
        // two harmonic 1-forms on the torus shift the kernel-included index
        assert!(row.lambda_with_kernel.unwrap() <= row.lambda);
    }
    assert!(r.rows[0].lambda_with_kernel.unwrap() < 1e-10);
}

#[test]
fn indexing_matches_reference_positions() {
    let mesh = build_flat_torus(32).unwrap();
    let mc = default_class(&mesh).unwrap();
    let opts = MainSuiteOptions { k_max: 20, p_list: vec![0, 1], include_closed_form: false, ..MainSuiteOptions::default() };
    let r = check_main_theorem(&mesh, &mc, &opts).unwrap();
    for row in &r.rows {
        let reference = reference_spectrum(AnalyticManifold::FlatTorus2D, row.p, 30).unwrap();
        let positive: Vec<f64> = reference.into_iter().filter(|&x| x > 0.0).collect();
        let expect = positive[row.k - 1];
        assert!((row.lambda - expect).abs() < 0.02 * expect, "k={} p={}: {} vs {expect}", row.k, row.p, row.lambda);
    }
}

#[test]
fn implausible_sphere_radius_warns() {
    let mesh = build_icosphere(2).unwrap();
    let mc = default_class(&mesh).unwrap().with_rh(PI).unwrap();
    let opts = MainSuiteOptions { k_max: 3, p_list: vec![0], ..MainSuiteOptions::default() };
    let r = check_main_theorem(&mesh, &mc, &opts).unwrap();
    assert!(r.diagnostics.warnings.iter().any(|w| w.contains("implausibly large")));
    assert_eq!(r.rows.len(), 6);
}

#[test]
fn main_suite_rejects_bad_inputs() {
    let mesh = build_flat_torus(8).unwrap();
    let mc = default_class(&mesh).unwrap();
    let bad = MainSuiteOptions { p_list: vec![3], ..MainSuiteOptions::default() };
    assert!(check_main_theorem(&mesh, &mc, &bad).is_err());
    let mc3 = ManifoldClass { n: 3, ..mc };
    assert!(matches!(check_main_theorem(&mesh, &mc3, &MainSuiteOptions::default()), Err(Error::Hypothesis(_))));
}

#[test]
fn whole_mesh_domain_is_tight() {
    let mesh = build_flat_torus(6).unwrap();
    let ball = geodesic_ball(&mesh, 0, 1e3).unwrap();
    let opts = DecompositionOptions { l_max: 1, solver: dense(), ..DecompositionOptions::default() };
    for p in 0..3 {
        let r = check_domain_decomposition(&mesh, &[ball.clone()], p, &opts).unwrap();
        assert_eq!(r.rows.len(), 1);
        let row = &r.rows[0];
        assert!(row.pass);
        assert_eq!(row.lambda, row.bound.unwrap());
    }
}

#[test]
fn two_disjoint_balls() {
    let mesh = build_flat_torus(8).unwrap();
    let balls = vec![geodesic_ball(&mesh, 0, 1.7).unwrap(), geodesic_ball(&mesh, 36, 1.7).unwrap()];
    let opts = DecompositionOptions { l_max: 3, solver: dense(), ..DecompositionOptions::default() };
    for p in 0..3 {
        let r = check_domain_decomposition(&mesh, &balls, p, &opts).unwrap();
        assert!(r.all_pass(), "{:?}", r.rows);
        assert!(r.rows.iter().any(|row| row.bound.is_some()));
    }
}

#[test]
fn overlapping_balls_are_rejected() {
    let mesh = build_flat_torus(8).unwrap();
    let balls = vec![geodesic_ball(&mesh, 0, 1.7).unwrap(), geodesic_ball(&mesh, 1, 1.7).unwrap()];
    let opts = DecompositionOptions { solver: dense(), ..DecompositionOptions::default() };
    assert!(matches!(check_domain_decomposition(&mesh, &balls, 0, &opts), Err(Error::Overlap(_))));
}

#[test]
fn net_rows_on_coarse_torus() {
    let mesh = build_flat_torus(8).unwrap();
    let opts = DecompositionOptions { solver: dense(), report_tol: 1e-9, ..DecompositionOptions::default() };
    let r = check_net_decomposition(&mesh, &[PI / 2.0, PI / 3.0], &[0, 1], &opts).unwrap();
    assert!(r.all_pass());
    for row in &r.rows {
        if let (Some(b), Some(m)) = (row.bound, row.margin) {
            assert!(m >= -1e-9 * b);
        }
    }
    assert!(r.rows.iter().any(|row| row.source == SOURCE_NET_DECOMPOSITION));
}

#[test]
fn net_rows_with_finite_bounds() {
    let mesh = build_flat_torus(16).unwrap();
    let opts = DecompositionOptions { l_max: 2, solver: dense(), report_tol: 1e-9 };
    for eps in [PI / 2.0, PI / 3.0] {
        let r = check_net_decomposition(&mesh, &[eps], &[0, 1, 2], &opts).unwrap();
        assert!(r.all_pass());
        let finite = r.rows.iter().filter(|row| row.bound.is_some()).count();
        assert!(finite > 0, "eps={eps}");
    }
}

#[test]
fn reports_are_deterministic() {
    let mesh = build_flat_torus(12).unwrap();
    let mc = default_class(&mesh).unwrap();
    let opts = MainSuiteOptions {
        k_max: 5,
        solver: SolverConfig { method: Some(SolveMethod::Iterative), seed: 9, ..SolverConfig::default() },
        ..MainSuiteOptions::default()
    };
    let a = emit_report(&check_main_theorem(&mesh, &mc, &opts).unwrap(), ReportFormat::Json).unwrap();
    let b = emit_report(&check_main_theorem(&mesh, &mc, &opts).unwrap(), ReportFormat::Json).unwrap();
    assert_eq!(a, b);
}
