//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 internal error, 2 validation or hypothesis violation,
//! 3 mesh validation or quality, 4 verification failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{
    cheng_function_bound, connection_laplacian_bound, hodge_bound, neg_ricci_bound, nonneg_ricci_bound,
    savo_hyperbolic_sigma, sigma_p_bounds, volume_bound, ManifoldClass, RicciConvention,
};
use crate::dec::{hodge_laplacian, solve_spectrum, DecOperators, SolverConfig};
use crate::mesh::{bishop_sanity, build_eps_net, build_flat_torus, build_icosphere, load_off, SurfaceMesh};
use crate::spaceform::{ball_dirichlet_eigenvalue_with, BallSolverConfig, ModelSpace};
use crate::verify::{
    check_main_theorem, check_net_decomposition, default_class, emit_json, emit_report, quadform_comparison_check,
    DecompositionOptions, MainSuiteOptions, ReportFormat, VerificationReport,
};
use crate::{Error, Result};

pub const EXIT_VERIFICATION_FAILED: i32 = 4;
pub const THREADS_ENV: &str = "HODGEBOUND_THREADS";

/// Decimal literal such as `3.1416` or `-1e-3`; no expressions.
fn decimal(s: &str) -> std::result::Result<f64, String> {
    let ok_chars = !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || "+-.eE".contains(c));
    match (ok_chars, s.parse::<f64>()) {
        (true, Ok(v)) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a decimal literal, got {s:?}")),
    }
}

/// Like [`decimal`] but also accepts `inf` for the `r_H → ∞` limit.
fn radius(s: &str) -> std::result::Result<f64, String> {
    if matches!(s, "inf" | "infinity" | "Inf") {
        return Ok(f64::INFINITY);
    }
    decimal(s)
}

#[derive(Debug, Parser)]
#[command(name = "hodgebound", version, about = "Upper bounds for Hodge Laplacian eigenvalues and their numerical verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    /// Ric >= (n-1) xi
    Lower,
    /// Ric >= -(n-1) xi, xi >= 0
    NegLower,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SourceArg {
    #[value(name = "thm1.1")]
    Thm11,
    #[value(name = "thm1.2")]
    Thm12,
    #[value(name = "cor3.3")]
    Cor33,
    #[value(name = "cor3.4")]
    Cor34,
    #[value(name = "thm3.5")]
    Thm35,
    #[value(name = "cor3.7")]
    Cor37,
    Sigma,
    Savo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Main,
    Decomp,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
pub struct ClassArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[arg(long, value_enum, default_value = "lower")]
    pub convention: ConventionArg,
    #[arg(long = "D", value_parser = decimal)]
    pub diameter: Option<f64>,
    #[arg(long = "rH", value_parser = radius)]
    pub rh: Option<f64>,
    #[arg(long = "V", value_parser = decimal)]
    pub volume: Option<f64>,
    #[arg(long, value_parser = decimal)]
    pub r0: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one bound
    Bound {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        p: usize,
        #[arg(long, value_enum)]
        source: SourceArg,
    },
    /// First Dirichlet eigenvalue of a model-space ball
    BallEig {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        xi: f64,
        #[arg(long, value_parser = decimal)]
        r: f64,
        #[arg(long, value_parser = decimal)]
        tol: Option<f64>,
    },
    /// Smallest Hodge Laplacian eigenvalues of a mesh
    Spectrum {
        /// torus:M, icosphere:S or off:PATH
        #[arg(long)]
        mesh: String,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        num: usize,
        #[arg(long, value_parser = decimal)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Admit negative cotan weights (results carry a warning)
        #[arg(long)]
        allow_indefinite: bool,
    },
    /// Greedy eps-net with both discretization clauses checked
    Net {
        #[arg(long)]
        mesh: String,
        #[arg(long, value_parser = decimal)]
        eps: f64,
        /// Curvature of the comparison space for the volume count
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        xi: Option<f64>,
    },
    /// Run a verification suite and write the report
    Verify {
        #[arg(long)]
        mesh: String,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
        #[arg(long, default_value = "0,1,2")]
        p_list: String,
        /// Net scales for the decomposition suite
        #[arg(long, default_value = "1.57079632679,1.04719755120")]
        eps_list: String,
        #[arg(long, default_value_t = 3)]
        l_max: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = decimal)]
        tol: Option<f64>,
        #[command(flatten)]
        class: ClassArgs,
    },
}

fn class_from(args: &ClassArgs, default_n: Option<usize>) -> Result<ManifoldClass> {
    let n = args
        .n
        .or(default_n)
        .ok_or_else(|| Error::hypothesis("the dimension --n is required"))?;
    let xi = args.xi.ok_or_else(|| Error::hypothesis("the curvature --xi is required"))?;
    let convention = match args.convention {
        ConventionArg::Lower => RicciConvention::LowerBound,
        ConventionArg::NegLower => RicciConvention::NegativeLowerBound,
    };
    let mut mc = ManifoldClass::new(n, xi, convention)?;
    mc.diameter = args.diameter;
    mc.rh = args.rh;
    mc.volume = args.volume;
    mc.r0 = args.r0;
    mc.validate()?;
    Ok(mc)
}

pub fn parse_mesh(descriptor: &str) -> Result<SurfaceMesh> {
    let (kind, arg) = descriptor
        .split_once(':')
        .ok_or_else(|| Error::domain(format!("mesh must be torus:M, icosphere:S or off:PATH, got {descriptor:?}")))?;
    let int = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::domain(format!("bad mesh size {s:?}")))
    };
    match kind {
        "torus" => build_flat_torus(int(arg)?),
        "icosphere" => build_icosphere(int(arg)?),
        "off" => load_off(arg),
        other => Err(Error::domain(format!("unknown mesh kind {other:?}"))),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    let items: std::result::Result<Vec<T>, _> = s.split(',').map(|t| t.trim().parse::<T>()).collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(Error::domain(format!("malformed {what} {s:?}"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(emit_json(&serde_json::to_value(v)?))
}

fn solver_config(tol: Option<f64>, seed: u64) -> Result<SolverConfig> {
    let mut cfg = SolverConfig { seed, ..SolverConfig::default() };
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Error::domain(format!("tolerance must be positive, got {t}")));
        }
        cfg.tol = t;
    }
    Ok(cfg)
}

/// Runs one subcommand; output goes to `out`. Returns the exit code.
fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Bound { class, k, p, source } => {
            let mut class = class;
            if matches!(source, SourceArg::Cor37) && class.xi.is_none() {
                // the connection Laplacian bound is stated for Ric >= 0 only
                class.xi = Some(0.0);
            }
            let mc = class_from(&class, None)?;
            let text = match source {
                SourceArg::Thm11 => to_json(&cheng_function_bound(&mc, k)?)?,
                SourceArg::Thm12 => to_json(&hodge_bound(&mc, k, p)?)?,
                SourceArg::Cor33 => to_json(&nonneg_ricci_bound(&mc, k, p)?)?,
                SourceArg::Cor34 => to_json(&neg_ricci_bound(&mc, k, p)?)?,
                SourceArg::Thm35 => to_json(&volume_bound(&mc, k, p)?)?,
                SourceArg::Cor37 => to_json(&connection_laplacian_bound(&mc, p)?)?,
                SourceArg::Sigma => to_json(&sigma_p_bounds(&mc, p)?)?,
                SourceArg::Savo => to_json(&json!({ "n": mc.n, "p": p, "value": savo_hyperbolic_sigma(mc.n, p)? }))?,
            };
            out.write_all(text.as_bytes())?;
            Ok(0)
        }
        Command::BallEig { n, xi, r, tol } => {
            let ms = ModelSpace::new(n, xi)?;
            let mut cfg = BallSolverConfig::default();
            if let Some(t) = tol {
                if !(t > 0.0) {
                    return Err(Error::domain(format!("tolerance must be positive, got {t}")));
                }
                cfg.bisection_rel_tol = t;
            }
            let res = ball_dirichlet_eigenvalue_with(&ms, r, &cfg)?;
            out.write_all(to_json(&res)?.as_bytes())?;
            Ok(0)
        }
        Command::Spectrum { mesh, p, num, tol, seed, allow_indefinite } => {
            let cfg = solver_config(tol, seed)?;
            let mesh = parse_mesh(&mesh)?;
            let ops = DecOperators::assemble(&mesh)?;
            let pencil = hodge_laplacian(&ops, p, allow_indefinite)?;
            let s = solve_spectrum(&pencil, num, &cfg)?;
            let doc = json!({
                "mesh": mesh.descriptor(),
                "spectrum": s,
                "operators": crate::dec::OperatorSummary::from(&ops),
                "threads": rayon::current_num_threads(),
            });
            out.write_all(emit_json(&doc).as_bytes())?;
            Ok(0)
        }
        Command::Net { mesh, eps, xi } => {
            let mesh = parse_mesh(&mesh)?;
            let net = build_eps_net(&mesh, eps)?;
            let xi = xi.unwrap_or(match mesh.kind() {
                crate::mesh::MeshKind::Icosphere { .. } => 1.0,
                _ => 0.0,
            });
            let sanity = bishop_sanity(&mesh, &net, &ModelSpace::new(2, xi)?)?;
            let doc = json!({
                "mesh": mesh.descriptor(),
                "eps": net.eps,
                "size": net.centers.len(),
                "centers": net.centers,
                "separation_ok": net.separation_ok,
                "covering_ok": net.covering_ok,
                "volume_count": sanity,
            });
            out.write_all(emit_json(&doc).as_bytes())?;
            Ok(if net.separation_ok && net.covering_ok { 0 } else { EXIT_VERIFICATION_FAILED })
        }
        Command::Verify { mesh, suite, k_max, p_list, eps_list, l_max, out: path, format, seed, tol, class } => {
            let p_list: Vec<usize> = parse_list(&p_list, "--p-list")?;
            if let Some(&p) = p_list.iter().find(|&&p| p > 2) {
                return Err(Error::domain(format!("form degree must be 0, 1 or 2, got {p}")));
            }
            let eps_list: Vec<f64> = parse_list::<String>(&eps_list, "--eps-list")?
                .iter()
                .map(|s| decimal(s).map_err(Error::domain))
                .collect::<Result<_>>()?;
            let solver = solver_config(tol, seed)?;
            let mesh = parse_mesh(&mesh)?;
            let overridden = class.xi.is_some() || class.diameter.is_some() || class.rh.is_some();
            let mc = if overridden {
                let base = default_class(&mesh).ok();
                let merged = ClassArgs {
                    n: class.n.or(Some(2)),
                    xi: class.xi.or(base.map(|b| b.xi)),
                    convention: class.convention,
                    diameter: class.diameter.or(base.and_then(|b| b.diameter)),
                    rh: class.rh.or(base.and_then(|b| b.rh)),
                    volume: class.volume,
                    r0: class.r0.or(base.and_then(|b| b.r0)),
                };
                class_from(&merged, Some(2))?
            } else {
                default_class(&mesh)?
            };
            let mut reports = Vec::new();
            if matches!(suite, SuiteArg::Main | SuiteArg::All) {
                let opts = MainSuiteOptions { k_max, p_list: p_list.clone(), solver: solver.clone(), ..MainSuiteOptions::default() };
                reports.push(check_main_theorem(&mesh, &mc, &opts)?);
            }
            if matches!(suite, SuiteArg::Decomp | SuiteArg::All) {
                let decomp_p: Vec<usize> = p_list.iter().copied().filter(|&p| p <= 2).collect();
                let opts = DecompositionOptions { l_max, solver: solver.clone(), ..DecompositionOptions::default() };
                reports.push(check_net_decomposition(&mesh, &eps_list, &decomp_p, &opts)?);
            }
            let name = match suite {
                SuiteArg::Main => "main",
                SuiteArg::Decomp => "decomp",
                SuiteArg::All => "all",
            };
            let mut report = VerificationReport::merge(name, reports);
            report.class = report.class.or(Some(mc));
            report.diagnostics.extra.insert("k_max".into(), k_max as f64);
            let mut quad_ok = true;
            if matches!(suite, SuiteArg::All) {
                let q = quadform_comparison_check(200, 5, 8, seed)?;
                report.diagnostics.extra.insert("quadform_trials".into(), q.trials as f64);
                report.diagnostics.extra.insert("quadform_violations".into(), q.failures.len() as f64);
                for f in &q.failures {
                    report.diagnostics.warnings.push(format!("quadratic-form comparison violated at k={} (seed {})", f.k, f.seed));
                }
                quad_ok = q.passed();
            }
            let fmt = match format {
                FormatArg::Json => ReportFormat::Json,
                FormatArg::Csv => ReportFormat::Csv,
            };
            std::fs::write(&path, emit_report(&report, fmt)?)?;
            let line = json!({
                "out": path.display().to_string(),
                "summary": report.summary,
                "passed": report.all_pass() && quad_ok,
            });
            out.write_all(emit_json(&line).as_bytes())?;
            Ok(if report.all_pass() && quad_ok { 0 } else { EXIT_VERIFICATION_FAILED })
        }
    }
}

/// Applies the thread-count environment variable to the global pool once.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

