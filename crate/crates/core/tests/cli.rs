//! End-to-end runs of the command-line examples.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

fn hodgebound(cmdline: &str) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_hodgebound"))
        .args(cmdline.split_whitespace())
        .current_dir(scratch())
        .output()
        .expect("binary runs");
    Outcome {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn scratch() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::copy(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/bad.off"), dir.join("bad.off")).unwrap();
    dir
}

fn values(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn bound_thm12_large_k() {
    let o = hodgebound("bound --source thm1.2 --n 2 --xi 0 --D 4.4429 --rH 3.1416 --k 1 --p 0");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = o.json();
    assert!((v["value"].as_f64().unwrap() - 2.3440).abs() < 5e-4);
    assert_eq!(v["regime"], "LargeK");
    assert_eq!(v["source"], "Thm 1.2");
}

#[test]
fn bound_connection_laplacian() {
    let o = hodgebound("bound --source cor3.7 --n 2 --rH 3.1416 --p 1");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let value = o.json()["value"].as_f64().unwrap();
    assert!((value - 32.0).abs() < 1e-3, "{value}");
}

#[test]
fn bound_missing_diameter() {
    let o = hodgebound("bound --source thm1.2 --n 2 --xi 0 --rH 3.1416 --k 1 --p 0");
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("diameter"), "{}", o.stderr);
}

#[test]
fn bound_other_sources() {
    let o = hodgebound("bound --source cor3.3 --n 2 --xi 0 --D 4.4429 --rH 3.1416 --k 3 --p 1");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let o = hodgebound("bound --source sigma --n 3 --xi 1 --convention neg-lower --rH inf --p 1");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = o.json();
    assert!((rows[0]["value"].as_f64().unwrap() - 8.0).abs() < 1e-12);
    // expressions are rejected
    assert_eq!(hodgebound("bound --source thm1.2 --n 2 --xi 0 --D pi --rH 3 --k 1 --p 0").code, 2);
}

#[test]
fn ball_eig_examples() {
    let o = hodgebound("ball-eig --n 3 --xi 0 --r 1");
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("9.869604401089"), "{}", o.stdout);
    let o = hodgebound("ball-eig --n 2 --xi 0 --r 1");
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("5.783185962947"), "{}", o.stdout);
    let o = hodgebound("ball-eig --n 2 --xi 1 --r 4");
    assert_eq!(o.code, 2);
    let o = hodgebound("ball-eig --n 2 --xi -1 --r 1 --tol 1e-12");
    assert_eq!(o.code, 0, "{}", o.stderr);
}

#[test]
fn spectrum_torus() {
    let o = hodgebound("spectrum --mesh torus:32 --p 0 --num 6");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let ev = values(&o.json()["spectrum"]["eigenvalues"]);
    let reference = [0.0, 1.0, 1.0, 1.0, 1.0, 2.0];
    assert_eq!(ev.len(), 6);
    assert!(ev[0].abs() < 1e-8);
    for (x, r) in ev.iter().zip(reference).skip(1) {
        assert!((x - r).abs() <= 0.02 * r, "{x} vs {r}");
    }
}

#[test]
fn spectrum_sphere_one_forms() {
    let o = hodgebound("spectrum --mesh icosphere:4 --p 1 --num 6");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let s = &o.json()["spectrum"];
    assert_eq!(s["kernel_dim"], 0);
    for x in values(&s["eigenvalues"]) {
        assert!((x - 2.0).abs() < 0.02 * 2.0, "{x}");
    }
}

#[test]
fn spectrum_boundary_mesh() {
    let o = hodgebound("spectrum --mesh off:bad.off --p 0 --num 3");
    assert_eq!(o.code, 3, "{}", o.stderr);
    assert!(o.stderr.contains("(0,1)"), "{}", o.stderr);
}

#[test]
fn net_examples() {
    let o = hodgebound("net --mesh torus:32 --eps 10");
    assert_eq!(o.code, 0);
    assert_eq!(o.json()["size"], 1);

    let o = hodgebound("net --mesh torus:32 --eps 0.7854");
    assert_eq!(o.code, 0);
    let v = o.json();
    assert_eq!(v["separation_ok"], true);
    assert_eq!(v["covering_ok"], true);

    let o = hodgebound("net --mesh icosphere:3 --eps 0.5");
    assert_eq!(o.code, 0);
    let v = o.json();
    let size = v["size"].as_f64().unwrap();
    let lower = v["volume_count"]["covering_lower_bound"].as_f64().unwrap();
    assert!(size >= lower, "{size} < {lower}");
}

#[test]
fn verify_main_torus() {
    let o = hodgebound("verify --mesh torus:32 --suite main --k-max 20 --p-list 0,1,2 --out r.json");
    assert_eq!(o.code, 0, "{}{}", o.stdout, o.stderr);
    let text = std::fs::read_to_string(scratch().join("r.json")).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["summary"]["failed"], 0);
    assert!(report["class"]["n"].is_number());
    assert!(report["diagnostics"]["version"].is_string());
}

#[test]
fn verify_decomposition_torus() {
    let o = hodgebound("verify --mesh torus:8 --suite decomp --out decomp.json");
    assert_eq!(o.code, 0, "{}{}", o.stdout, o.stderr);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(scratch().join("decomp.json")).unwrap()).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn verify_malformed_p_list() {
    assert_eq!(hodgebound("verify --mesh torus:8 --suite decomp --p-list 0,,x --out bad.json").code, 2);
    assert_eq!(hodgebound("verify --mesh torus:8 --suite main --p-list 0,7 --out bad.json").code, 2);
}

#[test]
fn verify_csv_and_failures() {
    let o = hodgebound("verify --mesh torus:8 --suite main --k-max 4 --p-list 0 --format csv --out r.csv");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let csv = std::fs::read_to_string(scratch().join("r.csv")).unwrap();
    assert!(csv.starts_with("k,p,lambda,bound,source,regime,margin,pass"));
    // overstated geometry shrinks the bound below the computed spectrum
    let o = hodgebound("verify --mesh torus:8 --suite main --k-max 4 --p-list 0 --xi 0 --D 300 --rH 300 --r0 300 --out fail.json");
    assert_eq!(o.code, 4, "{}{}", o.stdout, o.stderr);
    assert!(scratch().join("fail.json").exists());
}

#[test]
fn bad_arguments() {
    assert_eq!(hodgebound("spectrum --mesh sphere:3 --p 0 --num 3").code, 2);
    assert_eq!(hodgebound("frobnicate").code, 2);
    assert_eq!(hodgebound("--help").code, 0);
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = hodgebound::cli::run(["hodgebound", "ball-eig", "--n", "3", "--xi", "0", "--r", "1"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), hodgebound("ball-eig --n 3 --xi 0 --r 1").stdout);
}
