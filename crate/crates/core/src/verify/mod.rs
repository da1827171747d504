//! Checks computed spectra against the bounds and the discrete comparison
//! principles, and serializes the outcome.

mod quadform;
mod reference;
mod report;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::{hodge_bound, nonneg_ricci_bound, ManifoldClass, Regime, RicciConvention};
use crate::dec::{
    closed_pencils, dirichlet_spectrum, dirichlet_subproblem, hodge_laplacian, solve_spectrum, DecOperators,
    SolveMethod, SolverConfig, SpectrumResult,
};
use crate::mesh::{build_eps_net, geodesic_ball, MeshBall, MeshKind, SurfaceMesh};
use crate::{Error, Result};

pub use quadform::{quadform_comparison_check, QuadformFailure, QuadformSummary};
pub use reference::{reference_spectrum, AnalyticManifold, AnalyticSpectrum};
pub use report::{emit_json, emit_report, parse_report, Diagnostics, ReportFormat, ReportRow, Summary, VerificationReport};

pub const SOURCE_DECOMPOSITION: &str = "Lemma 2.5";
pub const SOURCE_NET_DECOMPOSITION: &str = "Cor 2.6";
pub const DEFAULT_REPORT_TOL: f64 = 1e-8;

/// Largest reference deviation at which smooth bounds are checked without a warning.
pub const REFERENCE_DEVIATION_LIMIT: f64 = 0.02;

/// The class each generator is verified against. The flat torus uses
/// `rH = π`: its global flat chart has `g_ij = δ_ij` on every ball of radius
/// up to the injectivity radius. The sphere's harmonic radius is not
/// computed; a conservative `π/4` is supplied instead.
pub fn default_class(mesh: &SurfaceMesh) -> Result<ManifoldClass> {
    match mesh.kind() {
        MeshKind::FlatTorus { .. } => ManifoldClass::new(2, 0.0, RicciConvention::LowerBound)?
            .with_diameter(2f64.sqrt() * PI)?
            .with_r0(PI)?
            .with_rh(PI),
        MeshKind::Icosphere { .. } => ManifoldClass::new(2, 1.0, RicciConvention::LowerBound)?
            .with_diameter(PI)?
            .with_rh(PI / 4.0),
        MeshKind::Loaded { path } => Err(Error::hypothesis(format!(
            "no default manifold class for loaded mesh {path}; supply n, xi, D and rH"
        ))),
    }
}

/// Warnings about class parameters that the mesh cannot certify.
pub fn hypothesis_warnings(mesh: &SurfaceMesh, mc: &ManifoldClass) -> Vec<String> {
    let mut w = Vec::new();
    let rh = mc.rh.unwrap_or(f64::NAN);
    match mesh.kind() {
        MeshKind::FlatTorus { .. } => {
            if mc.xi != 0.0 {
                w.push(format!("flat torus verified with xi = {} instead of 0", mc.xi));
            }
            if rh > PI {
                w.push(format!("rH = {rh} exceeds the flat torus injectivity radius pi"));
            }
        }
        MeshKind::Icosphere { .. } => {
            w.push(format!("harmonic radius of the round sphere is not computed; rH = {rh} is user-supplied"));
            if rh > PI / 2.0 {
                w.push(format!(
                    "rH = {rh} is implausibly large for the unit sphere (harmonic coordinates cannot cover beyond a hemisphere)"
                ));
            }
            if mc.xi > 1.0 {
                w.push(format!("xi = {} exceeds the sphere curvature 1", mc.xi));
            }
        }
        MeshKind::Loaded { .. } => {
            w.push("manifold class hypotheses are not checked against a loaded mesh".into());
        }
    }
    w
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainSuiteOptions {
    pub k_max: usize,
    pub p_list: Vec<usize>,
    pub solver: SolverConfig,
    pub report_tol: f64,
    /// Adds rows for the closed-form non-negative Ricci bound where it applies.
    pub include_closed_form: bool,
}

impl Default for MainSuiteOptions {
    fn default() -> Self {
        Self {
            k_max: 20,
            p_list: vec![0, 1, 2],
            solver: SolverConfig::default(),
            report_tol: DEFAULT_REPORT_TOL,
            include_closed_form: true,
        }
    }
}

fn method_name(methods: &[SolveMethod]) -> String {
    let dense = methods.iter().any(|m| *m == SolveMethod::Dense);
    let iter = methods.iter().any(|m| *m == SolveMethod::Iterative);
    match (dense, iter) {
        (true, true) => "Mixed".into(),
        (false, true) => "Iterative".into(),
        _ => "Dense".into(),
    }
}

fn base_diagnostics(solver: &SolverConfig, report_tol: f64) -> Diagnostics {
    Diagnostics {
        seed: solver.seed,
        tol: solver.tol,
        method: String::new(),
        report_tol,
        threads: rayon::current_num_threads(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        ..Diagnostics::default()
    }
}

/// Relative deviation of computed positive eigenvalues from the analytic ones.
fn reference_deviation(manifold: AnalyticManifold, s: &SpectrumResult, count: usize) -> Result<f64> {
    let reference = reference_spectrum(manifold, s.p, s.eigenvalues.len())?;
    Ok(s.eigenvalues
        .iter()
        .zip(&reference)
        .take(count)
        .filter(|(_, r)| **r > 0.0)
        .map(|(l, r)| (l - r).abs() / r)
        .fold(0.0, f64::max))
}

/// Rows `λ_{k,p} ≤ bound` for `k = 1..k_max`. `lambda` is the `k`-th positive
/// eigenvalue; `lambda_with_kernel` is `λ_k` counted from `λ_0` at the bottom
/// with harmonic forms included. A row passes only if both are within the bound.
pub fn check_main_theorem(mesh: &SurfaceMesh, mc: &ManifoldClass, opts: &MainSuiteOptions) -> Result<VerificationReport> {
    mc.validate()?;
    if mc.n != 2 {
        return Err(Error::hypothesis(format!("surface meshes have dimension 2, class has n = {}", mc.n)));
    }
    if opts.k_max == 0 {
        return Err(Error::domain("k_max must be >= 1"));
    }
    if let Some(&p) = opts.p_list.iter().find(|&&p| p > 2) {
        return Err(Error::domain(format!("form degree must be 0, 1 or 2, got {p}")));
    }
    let mut diagnostics = base_diagnostics(&opts.solver, opts.report_tol);
    diagnostics.warnings = hypothesis_warnings(mesh, mc);
    let ops = DecOperators::assemble(mesh)?;
    let betti = mesh.betti_numbers();
    let analytic = AnalyticManifold::for_mesh(mesh).ok();
    let with_closed_form = opts.include_closed_form && mc.ricci_lower() >= 0.0;

    let mut rows = Vec::new();
    let mut methods = Vec::new();
    let mut worst_dev: Option<f64> = None;
    for &p in &opts.p_list {
        let pencil = hodge_laplacian(&ops, p, false)?;
        let s = solve_spectrum(&pencil, opts.k_max + betti[p] + 1, &opts.solver)?;
        methods.push(s.method);
        diagnostics.warnings.extend(s.warnings.iter().cloned());
        diagnostics.kernel_dims.insert(format!("p{p}"), s.kernel_dim);
        if s.kernel_dim != betti[p] {
            diagnostics.warnings.push(format!(
                "degree {p}: kernel dimension {} differs from Betti number {}",
                s.kernel_dim, betti[p]
            ));
        }
        let positive = s.positive();
        if positive.len() < opts.k_max || s.eigenvalues.len() <= opts.k_max {
            return Err(Error::Solver {
                message: format!("degree {p}: only {} positive eigenvalues available", positive.len()),
                diagnostics: s.eigenvalues.clone(),
            });
        }
        if let Some(m) = analytic {
            let dev = reference_deviation(m, &s, opts.k_max + betti[p] + 1)?;
            worst_dev = Some(worst_dev.map_or(dev, |w: f64| w.max(dev)));
        }
        for k in 1..=opts.k_max {
            let lambda = positive[k - 1];
            let with_kernel = s.eigenvalues[k];
            let mut results = vec![hodge_bound(mc, k, p)?];
            if with_closed_form {
                results.push(nonneg_ricci_bound(mc, k, p)?);
            }
            for b in results {
                rows.push(
                    ReportRow {
                        k,
                        p,
                        lambda,
                        lambda_with_kernel: Some(with_kernel),
                        bound: b.value,
                        source: b.source,
                        regime: b.regime,
                        margin: None,
                        pass: false,
                        j: None,
                        l: None,
                        eps: None,
                    }
                    .judge(opts.report_tol),
                );
            }
        }
    }
    if let Some(dev) = worst_dev {
        if dev > REFERENCE_DEVIATION_LIMIT {
            diagnostics.warnings.push(format!(
                "discretization deviation {dev:.4} from the analytic spectrum exceeds {REFERENCE_DEVIATION_LIMIT}"
            ));
        }
    }
    diagnostics.reference_deviation = worst_dev;
    diagnostics.method = method_name(&methods);
    Ok(VerificationReport::new("main", mesh.descriptor(), Some(*mc), rows, diagnostics))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionOptions {
    pub l_max: usize,
    pub solver: SolverConfig,
    pub report_tol: f64,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        Self { l_max: 3, solver: SolverConfig::default(), report_tol: DEFAULT_REPORT_TOL }
    }
}

/// Open balls `B(x, eps)` around the net centers; pairwise disjoint because
/// centers are `2 eps`-separated.
pub fn net_balls(mesh: &SurfaceMesh, centers: &[usize], eps: f64) -> Result<Vec<MeshBall>> {
    centers.iter().map(|&c| geodesic_ball(mesh, c, eps * (1.0 - 1e-9))).collect()
}

/// Rows `λ_{jl-1,p}(closed) ≤ max_{i≤j} λ^D_{l-1,p}(D_i)` for every prefix
/// `D_1..D_j` of `balls` and `l = 1..l_max`, eigenvalues counted from
/// `λ_0` with the kernel included. A ball with fewer than `l` degrees of
/// freedom has `λ^D_{l-1} = +∞` and the row holds vacuously.
pub fn check_domain_decomposition(
    mesh: &SurfaceMesh,
    balls: &[MeshBall],
    p: usize,
    opts: &DecompositionOptions,
) -> Result<VerificationReport> {
    if balls.is_empty() {
        return Err(Error::domain("at least one domain is required"));
    }
    if p > 2 {
        return Err(Error::domain(format!("form degree must be 0, 1 or 2, got {p}")));
    }
    if opts.l_max == 0 {
        return Err(Error::domain("l_max must be >= 1"));
    }
    let ops = DecOperators::assemble(mesh)?;
    let parents = closed_pencils(&ops, false)?;
    let parent = &parents[p];
    let mut diagnostics = base_diagnostics(&opts.solver, opts.report_tol);
    let mut methods = Vec::new();

    // Dirichlet spectra; an empty ball has no finite eigenvalues
    let mut local: Vec<Vec<f64>> = Vec::with_capacity(balls.len());
    let mut owner = vec![usize::MAX; parent.dim()];
    for (i, ball) in balls.iter().enumerate() {
        match dirichlet_subproblem(mesh, &parents, ball) {
            Ok(sub) => {
                for &d in &sub.kept_dofs[p] {
                    if owner[d] != usize::MAX {
                        return Err(Error::Overlap(format!(
                            "domains {} and {i} share degree-{p} degree of freedom {d}",
                            owner[d]
                        )));
                    }
                    owner[d] = i;
                }
                match sub.pencil(p) {
                    Some(pen) => {
                        let s = dirichlet_spectrum(&sub, p, opts.l_max.min(pen.rank_b()), &opts.solver)?;
                        methods.push(s.method);
                        local.push(s.eigenvalues);
                    }
                    None => local.push(Vec::new()),
                }
            }
            Err(Error::DegenerateDomain(_)) => local.push(Vec::new()),
            Err(e) => return Err(e),
        }
    }
    // zero-extensions must also be orthogonal in energy
    for d in 0..parent.dim() {
        if owner[d] == usize::MAX {
            continue;
        }
        let row = parent.a.row(d);
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            if v != 0.0 && owner[c] != usize::MAX && owner[c] != owner[d] {
                return Err(Error::Overlap(format!(
                    "domains {} and {} are coupled through degrees of freedom {d} and {c}",
                    owner[d], owner[c]
                )));
            }
        }
    }
    let degenerate = local.iter().filter(|l| l.is_empty()).count();
    if degenerate > 0 {
        diagnostics.warnings.push(format!(
            "{degenerate} of {} domains have no interior degree-{p} degrees of freedom (eigenvalues +inf)",
            balls.len()
        ));
    }

    let needed = balls.len() * opts.l_max;
    let closed = solve_spectrum(parent, needed.min(parent.rank_b()), &opts.solver)?;
    methods.push(closed.method);
    diagnostics.kernel_dims.insert(format!("p{p}"), closed.kernel_dim);
    let mut rows = Vec::new();
    let mut skipped = 0;
    for j in 1..=balls.len() {
        for l in 1..=opts.l_max {
            let idx = j * l - 1;
            let bound = local[..j]
                .iter()
                .map(|ev| ev.get(l - 1).copied())
                .try_fold(f64::NEG_INFINITY, |m, v| v.map(|x| m.max(x)));
            let Some(&lambda) = closed.eigenvalues.get(idx) else {
                skipped += 1;
                continue;
            };
            let source = if l == 1 && j == balls.len() { SOURCE_NET_DECOMPOSITION } else { SOURCE_DECOMPOSITION };
            rows.push(
                ReportRow {
                    k: idx,
                    p,
                    lambda,
                    lambda_with_kernel: None,
                    bound,
                    source: source.to_string(),
                    regime: Regime::NotApplicable,
                    margin: None,
                    pass: false,
                    j: Some(j),
                    l: Some(l),
                    eps: None,
                }
                .judge(opts.report_tol),
            );
        }
    }
    if skipped > 0 {
        diagnostics.warnings.push(format!("{skipped} rows index beyond the closed spectrum and were omitted"));
    }
    diagnostics.method = method_name(&methods);
    let mut extra = BTreeMap::new();
    extra.insert(format!("domains_p{p}"), balls.len() as f64);
    diagnostics.extra = extra;
    Ok(VerificationReport::new("decomp", mesh.descriptor(), None, rows, diagnostics))
}

/// Decomposition rows for ε-net balls at each `eps` and degree.
pub fn check_net_decomposition(
    mesh: &SurfaceMesh,
    eps_list: &[f64],
    p_list: &[usize],
    opts: &DecompositionOptions,
) -> Result<VerificationReport> {
    let mut reports = Vec::new();
    for &eps in eps_list {
        let net = build_eps_net(mesh, eps)?;
        let balls = net_balls(mesh, &net.centers, eps)?;
        for &p in p_list {
            let mut r = check_domain_decomposition(mesh, &balls, p, opts)?;
            r.diagnostics.extra = r
                .diagnostics
                .extra
                .into_iter()
                .map(|(k, v)| (format!("eps{eps:.6}_{k}"), v))
                .collect();
            r.diagnostics.kernel_dims = r
                .diagnostics
                .kernel_dims
                .into_iter()
                .map(|(k, v)| (format!("eps{eps:.6}_{k}"), v))
                .collect();
            for w in r.diagnostics.warnings.iter_mut() {
                *w = format!("eps {eps}: {w}");
            }
            for row in r.rows.iter_mut() {
                row.eps = Some(eps);
            }
            reports.push(r);
        }
    }
    Ok(VerificationReport::merge("decomp", reports))
}

#[cfg(test)]
mod tests;
