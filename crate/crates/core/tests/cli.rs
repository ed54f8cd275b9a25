//! End-to-end checks of the `maxdiv` binary: flag plumbing, report
//! contents, exit codes, and the verify/bench subcommands.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxdiv"))
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

fn line_csv(dir: &Path) -> String {
    write(dir, "pts.csv", "id,x1\na,0\nb,1\nc,3\n")
}

fn report_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("report is valid JSON")
}

#[test]
fn run_local_search_uniform_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let csv = line_csv(dir.path());
    let out = bin()
        .args([
            "run", "--input", &csv, "--distance", "euclidean", "--constraint", "uniform",
            "--k", "2", "--algorithm", "local-search",
        ])
        .output()
        .unwrap();
    let report = report_json(&out);
    assert_eq!(report["instance"]["n"], 3);
    assert_eq!(report["instance"]["k"], 2);
    // ell defaults to default_iterations(k).
    assert_eq!(report["algorithm"]["ell"], 1);
    assert_eq!(report["solution_ids"], serde_json::json!(["a", "c"]));
    assert_eq!(report["objective"]["dispersion"], 3.0);
}

#[test]
fn run_brute_force_exact_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = line_csv(dir.path());
    let out = bin()
        .args([
            "run", "--input", &csv, "--distance", "euclidean", "--constraint", "uniform",
            "--k", "2", "--algorithm", "brute-force", "--compare",
        ])
        .output()
        .unwrap();
    let report = report_json(&out);
    assert_eq!(report["certified_bound"], 1.0);
    assert_eq!(report["oracle_comparison"]["achieved_ratio"], 1.0);
    assert_eq!(report["objective"]["total"], 3.0);
}

#[test]
fn run_intersection_with_epsilon_uses_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let csv = line_csv(dir.path());
    let cfg = write(
        dir.path(),
        "constraint.json",
        r#"{"kind":"intersection","m1":{"kind":"uniform","k":2},"m2":{"kind":"uniform","k":2}}"#,
    );
    let out = bin()
        .args([
            "run", "--input", &csv, "--distance", "euclidean", "--constraint", &cfg,
            "--algorithm", "local-search-intersection", "--epsilon", "0.3",
        ])
        .output()
        .unwrap();
    let report = report_json(&out);
    // ceil(12/0.3) + 1 = 41; k = 2 is far below the enumeration threshold.
    assert_eq!(report["algorithm"]["p"], 41);
    assert_eq!(report["algorithm"]["epsilon"], 0.3);
    assert_eq!(report["certified_bound"], 1.0);
    assert_eq!(report["solution_ids"], serde_json::json!(["a", "c"]));
    assert!(report["warnings"][0]
        .as_str()
        .unwrap()
        .contains("enumeration threshold"));
}

#[test]
fn run_intersection_search_mode_flags_inapplicable_bound() {
    let dir = tempfile::tempdir().unwrap();
    let csv = line_csv(dir.path());
    let cfg = write(
        dir.path(),
        "constraint.json",
        r#"{"kind":"intersection","m1":{"kind":"uniform","k":2},"m2":{"kind":"uniform","k":2}}"#,
    );
    let out = bin()
        .args([
            "run", "--input", &csv, "--distance", "euclidean", "--constraint", &cfg,
            "--algorithm", "local-search-intersection", "--p", "2", "--iterations", "50",
        ])
        .output()
        .unwrap();
    let report = report_json(&out);
    assert_eq!(report["certified_bound"], Value::Null);
    assert!(report["warnings"][0].as_str().unwrap().contains("8p"));
    assert_eq!(report["objective"]["dispersion"], 3.0);
}

#[test]
fn run_combined_with_linear_objective() {
    let dir = tempfile::tempdir().unwrap();
    let csv = line_csv(dir.path());
    let obj = write(
        dir.path(),
        "objective.json",
        r#"{"kind":"linear","weights":{"a":5.0}}"#,
    );
    let out = bin()
        .args([
            "run", "--input", &csv, "--distance", "euclidean", "--constraint", "uniform",
            "--k", "2", "--algorithm", "combined", "--objective", &obj, "--compare",
        ])
        .output()
        .unwrap();
    let report = report_json(&out);
    // With k = 2 the potential reduces to the linear part, so the local
    // optimum need not be the g-optimum; the certified factor
    // 1 - (3/8)(4/2) = 0.25 must still hold against OPT = 8.
    assert_eq!(report["certified_bound"], 0.25);
    assert_eq!(report["oracle_comparison"]["opt_value"], 8.0);
    let total = report["objective"]["total"].as_f64().unwrap();
    let ratio = report["oracle_comparison"]["achieved_ratio"].as_f64().unwrap();
    assert!(total >= 0.25 * 8.0 - 1e-9);
    assert!((ratio - total / 8.0).abs() < 1e-12);

    // Small instances certify the exact factor even without --compare.
    let out = bin()
        .args([
            "run", "--input", &csv, "--distance", "euclidean", "--constraint", "uniform",
            "--k", "2", "--algorithm", "combined", "--objective", &obj,
        ])
        .output()
        .unwrap();
    let report = report_json(&out);
    assert_eq!(report["certified_bound"], 0.25);
    assert_eq!(report["oracle_comparison"], Value::Null);
}

#[test]
fn achieved_ratio_within_certified_band() {
    // Report invariant: with an oracle comparison present, the achieved
    // ratio lies in [certified_bound - 1e-9, 1 + 1e-9].
    let dir = tempfile::tempdir().unwrap();
    let mut content = String::from("id,x1,x2\n");
    for i in 0..12 {
        let x = (i * 7 % 12) as f64 / 3.0;
        let y = (i * 5 % 12) as f64 / 4.0;
        content.push_str(&format!("p{i},{x},{y}\n"));
    }
    let csv = write(dir.path(), "pts12.csv", &content);
    let out = bin()
        .args([
            "run", "--input", &csv, "--distance", "manhattan", "--constraint", "uniform",
            "--k", "5", "--algorithm", "local-search", "--compare",
        ])
        .output()
        .unwrap();
    let report = report_json(&out);
    let ratio = report["oracle_comparison"]["achieved_ratio"].as_f64().unwrap();
    let bound = report["certified_bound"].as_f64().unwrap();
    assert!(ratio >= bound - 1e-9 && ratio <= 1.0 + 1e-9);
}

#[test]
fn run_precomputed_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write(dir.path(), "d.txt", "3\n0 1 3\n1 0 2\n3 2 0\n");
    let out = bin()
        .args([
            "run", "--matrix", &matrix, "--distance", "precomputed", "--constraint", "uniform",
            "--k", "2", "--algorithm", "greedy",
        ])
        .output()
        .unwrap();
    let report = report_json(&out);
    assert_eq!(report["instance"]["kernel"], "precomputed");
    assert_eq!(report["solution_ids"], serde_json::json!(["0", "2"]));
    assert_eq!(report["certified_bound"], Value::Null);
}

#[test]
fn malformed_inputs_exit_one_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let bad_csv = write(dir.path(), "bad.csv", "id,x1\na,0\nb,oops\n");
    let out = bin()
        .args([
            "run", "--input", &bad_csv, "--distance", "euclidean", "--constraint", "uniform",
            "--k", "2", "--algorithm", "local-search",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "stderr: {stderr}");

    let bad_matrix = write(dir.path(), "bad.txt", "2\n0 1\n2 0\n");
    let out = bin()
        .args([
            "run", "--matrix", &bad_matrix, "--constraint", "uniform", "--k", "1",
            "--algorithm", "greedy",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("symmetric"));

    // Unknown flags and missing required arguments are invalid input too.
    let out = bin().args(["run", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infeasible_constraint_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = line_csv(dir.path());
    let cfg = write(
        dir.path(),
        "constraint.json",
        r#"{"kind":"partition","blocks":[["a","b"]],"capacities":[1]}"#,
    );
    let out = bin()
        .args([
            "run", "--input", &csv, "--distance", "euclidean", "--constraint", &cfg,
            "--algorithm", "local-search",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("not covered"), "stderr: {stderr}");
}

#[test]
fn verify_small_trials_pass() {
    let out = bin()
        .args(["verify", "--trials", "50", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("set-inequality: 50 trials, 0 violations [OK]"));
    assert!(stdout.contains("guarantees:"));
}

#[test]
fn verify_zero_trials_vacuous() {
    let out = bin().args(["verify", "--trials", "0"]).output().unwrap();
    assert!(out.status.success());
}

#[test]
fn verify_injected_bad_matrix_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // d(0,1) = d(2,3) = 3, rest 1: fails the zero-sum quadratic-form test.
    let matrix = write(
        dir.path(),
        "bad.txt",
        "4\n0 3 1 1\n3 0 1 1\n1 1 0 3\n1 1 3 0\n",
    );
    let out = bin()
        .args(["verify", "--trials", "200", "--seed", "5", "--matrix", &matrix])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"), "stdout: {stdout}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("replay"), "stderr: {stderr}");
}

#[test]
fn bench_emits_csv_table() {
    let out = bin()
        .args(["bench", "--sizes", "40,80", "--k", "3", "--seed", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("n,k,ell,distance_evals,oracle_calls,millis"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "40");
    assert_eq!(first[1], "3");
}

#[test]
fn help_exits_zero() {
    let out = bin().args(["--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("maxdiv"));
}
