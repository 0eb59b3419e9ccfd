//! Exercises the binary: report contents, exit codes, flag validation.

use std::process::{Command, Output};

fn interdep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_interdep"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn analyze_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(&dir, "k3.txt", "3 3\n0 1\n1 2\n0 2\n");
    let out = interdep(&["analyze", &k3]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((json["lambda2"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert_eq!(json["robustness_exact"], 2);
    assert_eq!(json["kappa"], 2);
    assert_eq!(json["i_exact"], serde_json::json!({"num": 2, "den": 1}));
}

#[test]
fn exact_fields_disappear_above_caps() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(&dir, "k3.txt", "3 3\n0 1\n1 2\n0 2\n");
    let out = interdep(&["analyze", &k3, "--robustness-cap", "2", "--iso-cap", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("WARNING"));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json.get("robustness_exact").is_none());
    assert!(json.get("i_exact").is_none());
    assert_eq!(json["robustness_certified"], 2);
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(&dir, "empty.txt", "");
    let out = interdep(&["analyze", &empty]);
    assert_eq!(out.status.code(), Some(2));
    let bad = write(&dir, "bad.txt", "3 2\n0 1\n1 x\n");
    let out = interdep(&["analyze", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn growth_factor_at_most_one_is_rejected() {
    let out = interdep(&[
        "sweep-growth",
        "--n-list",
        "50",
        "--c",
        "0.5",
        "--trials",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spec_file_excludes_flags() {
    let out = interdep(&["sweep-threshold", "--spec", "x.json", "--n-list", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn too_large_for_exact_robustness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.txt");
    let out = interdep(&[
        "generate",
        "--n",
        "11",
        "--k",
        "2",
        "--p",
        "0.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = interdep(&["robustness", path.to_str().unwrap(), "--r", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = interdep(&[
        "robustness",
        path.to_str().unwrap(),
        "--r",
        "1",
        "--certify",
    ]);
    assert!(out.status.success());
}

#[test]
fn threshold_smoke_sweep_is_reproducible() {
    let args = [
        "sweep-threshold",
        "--n-list",
        "50",
        "--x=-2,0,2",
        "--trials",
        "10",
        "--seed",
        "9",
    ];
    let a = interdep(&args);
    let b = interdep(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn spectral_csv_and_fig1_demo() {
    let dir = tempfile::tempdir().unwrap();
    let p2 = write(&dir, "p2.txt", "2 1\n0 1\n");
    let out = interdep(&["spectral", &p2, "--format", "csv", "--graph-id", "p2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph_id,index,eigenvalue\np2,1,"));

    let out = interdep(&["consensus", "--fig1-demo", "--rounds", "50"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["converged_round"], serde_json::Value::Null);
    assert!(json["final_spread"].as_f64().unwrap() > 1.0);
    assert_eq!(json["f_local"], true);
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "generate",
        "fig1",
        "analyze",
        "robustness",
        "spectral",
        "sweep-threshold",
        "sweep-growth",
        "sweep-boundary",
        "sweep-sr",
        "consensus",
    ] {
        let out = interdep(&[sub, "--help"]);
        assert!(out.status.success(), "{sub}");
        assert!(!out.stdout.is_empty());
    }
}
