use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bounds::{ManifoldClass, Regime};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub k: usize,
    pub p: usize,
    /// The eigenvalue checked against the bound.
    pub lambda: f64,
    /// `λ_k` counted from the bottom with harmonic forms included
    /// (0-based), when it differs in meaning from `lambda`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_with_kernel: Option<f64>,
    /// `None` encodes `+∞`.
    pub bound: Option<f64>,
    pub source: String,
    pub regime: Regime,
    /// `bound - lambda`; `None` when the bound is infinite.
    pub margin: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Net scale of the domains, for decomposition rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl ReportRow {
    /// Fills margin and pass: a row fails iff `margin < -rel_tol * bound`.
    pub(crate) fn judge(mut self, rel_tol: f64) -> Self {
        match self.bound {
            Some(b) => {
                let worst = self.lambda.max(self.lambda_with_kernel.unwrap_or(f64::NEG_INFINITY));
                self.margin = Some(b - self.lambda);
                self.pass = b - worst >= -rel_tol * b.abs();
            }
            None => {
                self.margin = None;
                self.pass = true;
            }
        }
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub seed: u64,
    pub tol: f64,
    pub method: String,
    pub report_tol: f64,
    pub threads: usize,
    pub version: String,
    pub warnings: Vec<String>,
    #[serde(default)]
    pub kernel_dims: BTreeMap<String, usize>,
    /// Largest relative deviation of computed eigenvalues from the analytic
    /// reference spectrum, when one exists.
    #[serde(default)]
    pub reference_deviation: Option<f64>,
    #[serde(default)]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub mesh: String,
    pub class: Option<ManifoldClass>,
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
    pub diagnostics: Diagnostics,
}

impl VerificationReport {
    pub fn new(suite: &str, mesh: String, class: Option<ManifoldClass>, mut rows: Vec<ReportRow>, diagnostics: Diagnostics) -> Self {
        rows.sort_by(|a, b| {
            (a.k, a.p, a.j, a.l, &a.source)
                .cmp(&(b.k, b.p, b.j, b.l, &b.source))
                .then(a.eps.unwrap_or(0.0).total_cmp(&b.eps.unwrap_or(0.0)))
        });
        let passed = rows.iter().filter(|r| r.pass).count();
        let summary = Summary { rows: rows.len(), passed, failed: rows.len() - passed };
        Self { suite: suite.to_string(), mesh, class, rows, summary, diagnostics }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    /// Concatenates row sets of several reports over the same mesh.
    pub fn merge(suite: &str, reports: Vec<VerificationReport>) -> Self {
        let mesh = reports.first().map(|r| r.mesh.clone()).unwrap_or_default();
        let class = reports.iter().find_map(|r| r.class);
        let mut diagnostics = reports.first().map(|r| r.diagnostics.clone()).unwrap_or_default();
        let mut rows = Vec::new();
        for (i, r) in reports.into_iter().enumerate() {
            if i > 0 {
                diagnostics.warnings.extend(r.diagnostics.warnings);
                diagnostics.kernel_dims.extend(r.diagnostics.kernel_dims);
                diagnostics.extra.extend(r.diagnostics.extra);
                if diagnostics.method != r.diagnostics.method {
                    diagnostics.method = "Mixed".into();
                }
                diagnostics.report_tol = diagnostics.report_tol.max(r.diagnostics.report_tol);
                diagnostics.reference_deviation = diagnostics.reference_deviation.or(r.diagnostics.reference_deviation);
            }
            rows.extend(r.rows);
        }
        Self::new(suite, mesh, class, rows, diagnostics)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::domain(format!("unknown report format {other:?} (json|csv)"))),
        }
    }
}

/// Deterministic serialization: sorted keys, floats as `%.12e`.
pub fn emit_report(report: &VerificationReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let value = serde_json::to_value(report)?;
            Ok(emit_json(&value))
        }
        ReportFormat::Csv => Ok(emit_csv(report)),
    }
}

pub fn parse_report(text: &str) -> Result<VerificationReport> {
    Ok(serde_json::from_str(text)?)
}

pub fn emit_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

pub(crate) fn format_float(x: f64) -> String {
    format!("{x:.12e}")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else {
                let f = n.as_f64().unwrap_or(f64::NAN);
                if f.is_finite() {
                    out.push_str(&format_float(f));
                } else {
                    out.push_str("null");
                }
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            // serde_json's default map is ordered by key
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push_str(": ");
                write_value(out, &map[*key], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::LargeK => "LargeK",
        Regime::SmallK => "SmallK",
        Regime::NotApplicable => "NotApplicable",
    }
}

fn emit_csv(report: &VerificationReport) -> String {
    let opt = |x: Option<f64>| x.map_or_else(|| "inf".to_string(), format_float);
    let mut s = String::from("k,p,lambda,bound,source,regime,margin,pass\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.k,
            r.p,
            format_float(r.lambda),
            opt(r.bound),
            r.source,
            regime_name(r.regime),
            opt(r.margin),
            r.pass
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::RicciConvention;

    fn sample() -> VerificationReport {
        let mc = ManifoldClass::new(2, 0.0, RicciConvention::LowerBound).unwrap().with_rh(3.0).unwrap();
        let rows = vec![
            ReportRow {
                k: 2,
                p: 1,
                lambda: 0.1 + 0.2,
                lambda_with_kernel: Some(0.0),
                bound: Some(2.0 / 3.0),
                source: "Thm 1.2".into(),
                regime: Regime::LargeK,
                margin: None,
                pass: false,
                j: None,
                l: None,
                eps: None,
            }
            .judge(1e-8),
            ReportRow {
                k: 0,
                p: 0,
                lambda: 1e-300,
                lambda_with_kernel: None,
                bound: None,
                source: "Lemma 2.5".into(),
                regime: Regime::NotApplicable,
                margin: None,
                pass: false,
                j: Some(1),
                l: Some(1),
                eps: Some(0.5),
            }
            .judge(1e-8),
        ];
        VerificationReport::new("main", "torus:8".into(), Some(mc), rows, Diagnostics { seed: 3, tol: 1e-8, ..Default::default() })
    }

    #[test]
    fn rows_are_ordered_and_judged() {
        let r = sample();
        assert_eq!(r.rows[0].k, 0);
        assert!(r.rows[0].pass && r.rows[1].pass);
        assert_eq!(r.summary, Summary { rows: 2, passed: 2, failed: 0 });
        let bad = ReportRow { bound: Some(0.2), ..r.rows[1].clone() }.judge(1e-8);
        assert!(!bad.pass);
        let tight = ReportRow { bound: Some(0.3 * (1.0 - 1e-9)), ..r.rows[1].clone() }.judge(1e-8);
        assert!(tight.pass);
    }

    #[test]
    fn json_round_trip_is_stable() {
        let r = sample();
        let text = emit_report(&r, ReportFormat::Json).unwrap();
        let back = parse_report(&text).unwrap();
        assert_eq!(emit_report(&back, ReportFormat::Json).unwrap(), text);
        assert_eq!(back.rows.len(), r.rows.len());
        assert_eq!(back.class, r.class);
        for (a, b) in back.rows.iter().zip(&r.rows) {
            assert!((a.lambda - b.lambda).abs() <= 1e-12 * b.lambda.abs());
            assert_eq!((a.k, a.p, a.pass, a.bound.is_none()), (b.k, b.p, b.pass, b.bound.is_none()));
        }
        assert!(text.contains("\"lambda\": 3.000000000000e-1"));
        assert!(text.contains("\"bound\": null"));
    }

    #[test]
    fn keys_are_sorted() {
        let text = emit_report(&sample(), ReportFormat::Json).unwrap();
        let top: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim()).collect();
        let mut sorted = top.clone();
        sorted.sort();
        assert_eq!(top, sorted);
    }

    #[test]
    fn empty_report() {
        let r = VerificationReport::new("main", "torus:3".into(), None, vec![], Diagnostics::default());
        let text = emit_report(&r, ReportFormat::Json).unwrap();
        let back = parse_report(&text).unwrap();
        assert_eq!(back.summary, Summary::default());
        assert_eq!(emit_report(&r, ReportFormat::Csv).unwrap().lines().count(), 1);
    }

    #[test]
    fn csv_matches_rows() {
        let csv = emit_report(&sample(), ReportFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,p,lambda,bound,source,regime,margin,pass");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains(",inf,"));
    }
}
