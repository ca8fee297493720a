use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"));
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hausdorff")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header lines and numeric rows of a CSV artifact.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    let mut body = text.lines().skip_while(|l| {
        if let Some(m) = l.strip_prefix("# ") {
            meta.push(m.to_string());
            true
        } else {
            false
        }
    });
    body.next();
    for line in body {
        rows.push(line.split(',').map(|v| v.parse().unwrap()).collect());
    }
    (meta, rows)
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn apply_cesaro_to_indicator() {
    let o = run(&["apply", "--spec", &fixture("cesaro1"), "--function", "indicator01", "--t-range=-3,3", "--grid-n", "61"]);
    assert!(o.status.success());
    let (meta, rows) = parse_csv(&stdout(&o));
    assert!(meta.iter().any(|m| m.starts_with("spec_sha256: ")));
    assert!(meta.iter().any(|m| m.starts_with("quadrature_error_estimate: ")));
    assert_eq!(rows.len(), 61);
    for r in rows {
        let want = if r[0] <= 1.0 { 1.0 } else { 1.0 / r[0] };
        assert!((r[1] - want).abs() < 1e-6, "x = {}", r[0]);
        assert_eq!(r[2], 0.0);
    }
}

#[test]
fn apply_identity_returns_samples() {
    let o = run(&["apply", "--spec", &fixture("identity"), "--function", "gaussian", "--grid-n", "41", "--t-range=-1,1"]);
    assert!(o.status.success());
    for r in parse_csv(&stdout(&o)).1 {
        let z = (r[0] - 1.0) / 0.125;
        assert!((r[1] - (-0.5 * z * z).exp()).abs() < 1e-15);
    }
}

#[test]
fn apply_header_reports_parameters() {
    let o = run(&["apply", "--spec", &fixture("ck2"), "--function", "gaussian", "--grid-n", "5"]);
    assert!(o.status.success());
    let (meta, _) = parse_csv(&stdout(&o));
    assert!(meta.contains(&"p: 2".to_string()));
    assert!(meta.contains(&"kernel: ck k=2".to_string()));
}

#[test]
fn apply_tabulated_function() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("f.csv");
    let rows: String = (0..=200).map(|k| format!("{},{}\n", 0.01 * k as f64, 1.0)).collect();
    std::fs::write(&table, format!("x,value\n{rows}")).unwrap();
    let o = run(&["apply", "--spec", &fixture("cesaro1"), "--function", table.to_str().unwrap(), "--grid-n", "3", "--t-range=-1,0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for r in parse_csv(&stdout(&o)).1 {
        assert!((r[1] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn symbol_agreement_for_cesaro() {
    let o = run(&["symbol", "--spec", &fixture("cesaro1"), "--s-range=-5,5", "--mode", "both"]);
    assert!(o.status.success());
    let rows = parse_csv(&stdout(&o)).1;
    assert_eq!(rows.len(), 201);
    assert!(rows.iter().all(|r| r[3] < 1e-7));
}

#[test]
fn symbol_of_identity_and_ck2() {
    let o = run(&["symbol", "--spec", &fixture("identity"), "--s-range=-3,3", "--grid-n", "7"]);
    assert!(o.status.success());
    for r in parse_csv(&stdout(&o)).1 {
        assert_eq!((r[1], r[2]), (1.0, 0.0));
    }
    let o = run(&["symbol", "--spec", &fixture("ck2"), "--s-range=-1,1", "--grid-n", "3"]);
    let rows = parse_csv(&stdout(&o)).1;
    assert_eq!(rows[1][0], 0.0);
    assert!((rows[1][1] - 8.0 / 3.0).abs() < 1e-12);
}

#[test]
fn verify_cesaro_diag() {
    let o = run(&["verify", "--spec", &fixture("cesaro1"), "--suite", "diag"]);
    assert!(o.status.success());
    let r = report(&o);
    let c = check(&r, "diag");
    assert_eq!(c["status"], "pass");
    assert!(c["residual"].as_f64().unwrap() < 1e-3);
}

#[test]
fn verify_identity_all() {
    let o = run(&["verify", "--spec", &fixture("identity")]);
    assert!(o.status.success());
    let r = report(&o);
    assert_eq!(r["passed"], true);
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["status"], "pass", "{c}");
    }
    for name in ["diag", "adjoint", "normality", "inverse"] {
        assert_eq!(check(&r, name)["residual"], 0.0);
    }
}

#[test]
fn verify_geometric_inverse() {
    let o = run(&["verify", "--spec", &fixture("geometric"), "--suite", "inverse"]);
    assert!(o.status.success());
    let r = report(&o);
    let c = check(&r, "inverse");
    assert_eq!(c["status"], "pass");
    let b: Vec<f64> = c["details"]["b"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(b[0], 1.0);
    assert_eq!(b[1], -0.25);
    assert!(b[2..].iter().all(|v| *v == 0.0));
}

#[test]
fn inapplicable_suite_is_skipped() {
    let o = run(&["verify", "--spec", &fixture("cesaro1"), "--suite", "inverse"]);
    assert!(o.status.success());
    let r = report(&o);
    let c = check(&r, "inverse");
    assert_eq!(c["status"], "skip");
    assert!(c["reason"].as_str().unwrap().contains("discrete"));
}

fn spectrum(name: &str) -> (Output, Value) {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let o = run(&["spectrum", "--spec", &fixture(name), "--summary", summary.to_str().unwrap()]);
    let v = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    (o, v)
}

#[test]
fn spectrum_summaries() {
    let (o, s) = spectrum("cesaro2");
    assert!(o.status.success());
    assert!((s["operator_norm"]["value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(s["violations"], 0);
    assert_eq!(parse_csv(&stdout(&o)).1.len(), 201 * 201);

    let (_, s) = spectrum("geometric");
    assert!((s["operator_norm"]["value"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(s["invertibility"]["verdict"], "invertible");
    assert!((s["invertibility"]["inf"].as_f64().unwrap() - 0.8).abs() < 1e-10);

    let (_, s) = spectrum("cesaro1");
    assert_eq!(s["invertibility"]["verdict"], "not-invertible");
}

#[test]
fn outputs_are_deterministic() {
    let args = ["symbol", "--spec", &fixture("ck0_5"), "--grid-n", "51"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["apply", "--spec", &fixture("cesaro2"), "--function", "xexp", "--grid-n", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dimension":1,"measure":{"kind":"sphere"}}"#).unwrap();
    assert_eq!(run(&["symbol", "--spec", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["symbol", "--spec", &fixture("ck2"), "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["apply", "--spec", &fixture("ck2"), "--function", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    // Agreement is ~1e-15, never below 1e-20.
    let o = run(&["symbol", "--spec", &fixture("ck2"), "--grid-n", "5", "--tol", "1e-20"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["symbol", "--spec", &fixture("cesaro1"), "--s-range=1e7,2e7", "--grid-n", "2", "--mode", "quadrature"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(parse_csv(&stdout(&o)).1.iter().all(|r| r[1].is_nan()));

    let o = Command::new(env!("CARGO_BIN_EXE_hausdorff"))
        .args(["symbol", "--spec", &fixture("ck2"), "--grid-n", "3"])
        .env("HAUSDORFF_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
