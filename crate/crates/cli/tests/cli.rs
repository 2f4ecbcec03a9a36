//! End-to-end runs of the `xychern` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xychern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xychern")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str], dir: &Path) -> (i32, Value) {
    let out = dir.join("out.json");
    let mut full = args.to_vec();
    full.extend(["--format", "json", "--out", out.to_str().unwrap()]);
    let status = xychern(&full).status.code().unwrap();
    let doc = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    (status, doc)
}

fn rows(doc: &Value) -> &Vec<Value> {
    doc["rows"].as_array().unwrap()
}

#[test]
fn chern_scan_skips_the_critical_field() {
    let dir = tempfile::tempdir().unwrap();
    let (code, doc) = run_json(&["scan-chern", "--steps", "21", "--grid", "16x16", "--n-sites", "256"], dir.path());
    assert_eq!(code, 0);
    let rows = rows(&doc);
    assert_eq!(rows.len(), 20);
    assert_eq!(doc["summary"]["skipped_near_critical"], serde_json::json!([1.0]));
    for r in rows {
        let expected = if r["lambda"].as_f64().unwrap() < 1.0 { -1 } else { 0 };
        assert_eq!(r["label"], expected, "{r}");
    }
    assert!(doc["config"]["scan"]["steps"] == 21);
}

#[test]
fn chern_scan_above_the_transition() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "scan-chern",
        "--lambda-min",
        "1.1",
        "--lambda-max",
        "1.2",
        "--steps",
        "2",
        "--grid",
        "16x16",
        "--n-sites",
        "256",
    ];
    let (code, doc) = run_json(&args, dir.path());
    assert_eq!(code, 0);
    assert_eq!(rows(&doc).len(), 2);
    assert!(rows(&doc).iter().all(|r| r["label"] == 0));
}

#[test]
fn invalid_configurations_exit_with_two() {
    for args in [
        vec!["scan-chern", "--steps", "1"],
        vec!["scan-chern", "--lambda-min", "2", "--lambda-max", "1"],
        vec!["scan-chern", "--tol", "0.1"],
        vec!["scan-chern", "--grid", "64"],
        vec!["scan-chern", "--grid", "8x8"],
        vec!["scan-chern", "--n-sites", "64"],
        vec!["metric-scan", "--n-sites", "7"],
        vec!["oracle-verify", "--n-sites", "14"],
        vec!["no-such-command"],
    ] {
        assert_eq!(xychern(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn gap_map_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (code, doc) = run_json(&["gap-map", "--steps", "21"], dir.path());
    assert_eq!(code, 0);
    let gap_at = |g: f64, l: f64| {
        rows(&doc)
            .iter()
            .find(|r| r["gamma"].as_f64() == Some(g) && r["lambda"].as_f64() == Some(l))
            .map(|r| r["gap"].as_f64().unwrap())
            .unwrap()
    };
    assert_eq!(gap_at(0.5, 1.0), 0.0);
    assert_eq!(gap_at(0.0, 0.3), 0.0);
    assert_eq!(gap_at(1.0, 0.0), 1.0);
    assert_eq!(rows(&doc).len(), 21 * 21);
    assert_eq!(doc["summary"]["zero_set_matches_critical_lines"], true);
}

#[test]
fn metric_scan_grows_toward_criticality() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["metric-scan", "--gamma", "1", "--lambda-min", "0.5", "--lambda-max", "0.99", "--steps", "3"];
    let (code, doc) = run_json(&args, dir.path());
    assert_eq!(code, 0);
    let g: Vec<f64> = rows(&doc).iter().map(|r| r["g_lambda_lambda"].as_f64().unwrap()).collect();
    assert!(g.windows(2).all(|w| w[0] < w[1]), "{g:?}");
    assert!(rows(&doc).iter().all(|r| r["hermiticity_defect"].as_f64().unwrap() < 1e-9));
    assert_eq!(doc["summary"]["g_lambda_lambda_increasing_below_critical"], true);

    let (_, doc) = run_json(&["metric-scan", "--lambda-min", "0.5", "--lambda-max", "1.5", "--steps", "3"], dir.path());
    assert_eq!(rows(&doc)[1]["status"], "skipped_critical");
    assert_eq!(rows(&doc)[1]["g_lambda_lambda"], Value::Null);
}

#[test]
fn oracle_verification_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (code, doc) = run_json(&["oracle-verify"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(doc["summary"]["pass"], true);
    assert!(doc["summary"]["max_energy_deviation"].as_f64().unwrap() < 1e-10);
    assert_eq!(rows(&doc).len(), 20);

    let report = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_xychern"))
            .args(["oracle-verify", "--seed", "11", "--samples", "6"])
            .env("XYCHERN_WORKERS", workers)
            .output()
            .unwrap()
            .stdout
    };
    let a = report("1");
    assert_eq!(a, report("1"));
    assert_eq!(a, report("3"));
}

#[test]
fn csv_has_header_and_lf_lines() {
    let out = xychern(&["gap-map", "--steps", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("gamma,lambda,gap,zero\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + 9);
}

#[test]
fn bad_worker_count_is_a_config_error() {
    let out =
        Command::new(env!("CARGO_BIN_EXE_xychern")).args(["gap-map"]).env("XYCHERN_WORKERS", "many").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
