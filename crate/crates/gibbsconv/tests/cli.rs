//! Black-box tests of the command-line interface: output formats, file
//! output, exit codes, and rerun determinism of the scenario commands.

use std::process::{Command, Output};

fn gibbsconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gibbsconv"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn entropy_emits_json_with_metrics() {
    let out = gibbsconv(&["entropy", "cosine:0.3", "--level", "10"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["scenario"], "entropy cosine(0.3)");
    assert!(v["metrics"]["entropy"].as_f64().unwrap() > 0.5);
    assert!((v["metrics"]["eigen_lambda"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn iterate_emits_csv_table() {
    let out = gibbsconv(&[
        "iterate",
        "cosine:0.4",
        "--k-max",
        "3",
        "--level",
        "10",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,sup_dist_to_half,entropy"));
    assert_eq!(lines.count(), 4); // k = 0..=3
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join("gibbsconv-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("entropy.json");
    let out = gibbsconv(&[
        "entropy",
        "constant_half",
        "--level",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["metrics"]["entropy"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-10);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn invalid_inputs_exit_2() {
    for args in [
        &["entropy", "nonsense"][..],
        &["entropy", "cosine:0.6"],
        &["entropy", "cosine:0.3", "--grid", "30"],
        &["entropy", "cosine:0.3", "--level", "0"],
        &["entropy", "cosine:0.3", "--tol", "-1"],
        &["periodic", "cosine:0.2"],
        &["iterate", "cosine:0.2", "--k-max", "99"],
        &["derivative", "cosine:0.2", "cosine:0.3", "--direction", "tan:1"],
    ] {
        let out = gibbsconv(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn scenario_reruns_are_byte_identical() {
    for args in [
        &["entropy", "cosine:0.3", "--level", "10"][..],
        &["convolve", "cosine:0.2", "cosine:0.3", "--level", "10"],
        &["variational", "cosine:0.2", "--level", "10", "--steps", "200"],
    ] {
        let a = gibbsconv(args);
        let b = gibbsconv(args);
        assert!(a.status.success(), "args {args:?}");
        assert_eq!(a.stdout, b.stdout, "args {args:?}");
    }
}
