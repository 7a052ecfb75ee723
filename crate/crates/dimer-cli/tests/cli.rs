//! End-to-end tests of the command-line interface, driving the built binary.

use std::process::Command;

fn dimer() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dimer"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = dimer().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn criticality_classifies_and_rejects() {
    let (code, stdout, _) = run(&["criticality", "--a", "1", "--b", "4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("non-critical"));
    let (code, stdout, _) = run(&["criticality", "--a", "1", "--b", "1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("regime: critical"));
    // usage error on non-positive weights
    let (code, _, stderr) = run(&["criticality", "--a", "0", "--b", "1"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("positive"));
}

#[test]
fn roots_sweep_shape_and_gap() {
    let (code, stdout, _) = run(&["roots", "--a", "1", "--b", "4", "--samples", "64"]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("theta,r1p,r1m,r2p,r2m"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 63);
    for row in rows {
        let r1p: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!(r1p > 1.0);
    }
    // sample guard
    let (code, _, _) = run(&["roots", "--samples", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn roots_deterministic_output() {
    let (_, first, _) = run(&["roots", "--a", "1", "--b", "4", "--samples", "32"]);
    let (_, second, _) = run(&["roots", "--a", "1", "--b", "4", "--samples", "32"]);
    assert_eq!(first, second);
}

#[test]
fn invk_single_entry_and_sweep() {
    let (code, stdout, _) = run(&[
        "invk", "--i", "up", "--j", "up", "--n0", "2", "--n", "5", "--m", "3", "--a", "1", "--b",
        "4",
    ]);
    assert_eq!(code, 0);
    let value: f64 = stdout
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("value = ")
        .parse()
        .unwrap();
    assert!((value - 0.0169303).abs() < 1e-5, "value {value}");
    let (code, stdout, _) = run(&[
        "invk", "--i", "up", "--j", "down", "--n0", "1", "--n", "0", "--m", "0", "--sweep",
        "--dn", "1", "--dm", "1", "--a", "1", "--b", "4",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("i,j,n0,n,m,value,imag_residual"));
    assert_eq!(stdout.lines().count(), 10);
}

#[test]
fn invk_json_mirrors_csv() {
    let (code, stdout, _) = run(&[
        "invk", "--i", "up", "--j", "up", "--n0", "1", "--n", "1", "--m", "0", "--sweep",
        "--dn", "0", "--dm", "0", "--format", "json", "--a", "1", "--b", "1",
    ]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let rows = parsed.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let v = rows[0]["value"].as_f64().unwrap();
    assert!((v + 0.25).abs() < 1e-6, "uniform adjacent entry {v}");
}

#[test]
fn asymptote_probe_and_precondition() {
    let (code, stdout, _) = run(&[
        "asymptote", "--case", "cor1", "--i", "up", "--j", "up", "--n0", "1", "--n", "2",
        "--a", "1", "--b", "4", "--schedule", "25,50",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("var,asymptotic,quadrature,ratio"));
    // wrong sign of n0 for cor3 is a usage error
    let (code, _, stderr) = run(&[
        "asymptote", "--case", "cor3", "--i", "up", "--j", "up", "--n0", "-1", "--a", "1",
        "--b", "4", "--schedule", "5,8",
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("n0"));
}

#[test]
fn oracle_count_agrees() {
    let (code, stdout, _) = run(&[
        "oracle", "--a", "0.5", "--b", "3", "count", "--n-min", "-1", "--n-max", "0",
        "--m-min", "0", "--m-max", "1",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("agree = true"));
}

#[test]
fn validate_fast_passes() {
    let (code, stdout, _) = run(&["validate", "--level", "fast"]);
    assert_eq!(code, 0, "stdout:\n{stdout}");
    assert!(stdout.lines().all(|l| l.starts_with("[PASS]")));
    // unknown level is a usage error
    let (code, _, _) = run(&["validate", "--level", "bogus"]);
    assert_eq!(code, 1);
}

#[test]
fn green_prints_value_and_coefficients() {
    let (code, stdout, _) = run(&[
        "green", "--i", "up", "--j", "up", "--n", "1", "--n0", "2", "--theta", "1.0",
        "--coefficients", "--a", "1", "--b", "4",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("c4 ="));
    // degenerate omega = 1 is a numerical error (exit 2)
    let (code, _, _) = run(&[
        "green", "--i", "up", "--j", "up", "--n", "1", "--n0", "2", "--theta", "0",
        "--a", "1", "--b", "4",
    ]);
    assert_eq!(code, 2);
}
