//! End-to-end checks of the `oap` binary: exit codes, file artifacts,
//! output formats.

use std::path::Path;
use std::process::{Command, Output};

fn oap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_instance(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn gen_writes_exact_minimal_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.txt");
    let result = oap(&[
        "gen", "--n", "1", "--lo", "5", "--hi", "5", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    assert_eq!(std::fs::read_to_string(out).unwrap(), "1\n5\n");
}

#[test]
fn gen_rejects_inverted_range_with_usage_exit() {
    let result = oap(&["gen", "--n", "3", "--lo", "9", "--hi", "2"]);
    assert_eq!(result.status.code(), Some(2));
    assert!(stderr(&result).contains("--lo"));
}

#[test]
fn gen_then_solve_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("i.txt");
    assert!(oap(&[
        "gen", "--n", "6", "--seed", "11", "--out",
        out.to_str().unwrap(),
    ])
    .status
    .success());
    let solved = oap(&["solve", "--instance", out.to_str().unwrap()]);
    assert!(solved.status.success());
    assert!(stdout(&solved).contains("opt cost:"));
}

#[test]
fn solve_missing_file_exits_1() {
    let result = oap(&["solve", "--instance", "/nonexistent/nope.txt"]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn simulate_perfect_advice_prints_unit_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(dir.path(), "i.txt", "2\n1 9\n9 1\n");
    let result = oap(&[
        "simulate", "--instance", &path, "--epsilon", "0", "--mu", "0.1",
    ]);
    assert!(result.status.success());
    let text = stdout(&result);
    assert!(text.contains("follow-prediction"));
    assert!(text.contains("1.0000"), "no unit ratio in:\n{text}");
}

#[test]
fn simulate_json_round_trips_into_trial_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(dir.path(), "i.txt", "2\n3 9\n9 3\n");
    let result = oap(&[
        "simulate", "--instance", &path, "--epsilon", "0.5", "--mu", "0.5",
        "--seed", "3", "--format", "json",
    ]);
    assert!(result.status.success());
    let record: oap_core::TrialRecord = serde_json::from_str(&stdout(&result)).unwrap();
    assert_eq!(record.n, 2);
    assert_eq!(record.opt_cost, 6);
    assert!(record.ratios[&oap_core::Algorithm::FollowPrediction] >= 1.0);
}

#[test]
fn simulate_infeasible_magnitude_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(dir.path(), "flat.txt", "2\n5 5\n5 5\n");
    let result = oap(&[
        "simulate", "--instance", &path, "--epsilon", "0.5", "--mu", "0.5",
    ]);
    assert_eq!(result.status.code(), Some(1));
    assert!(stderr(&result).contains("infeasible"));
}

#[test]
fn simulate_rejects_out_of_range_epsilon_as_usage() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(dir.path(), "i.txt", "1\n7\n");
    let result = oap(&[
        "simulate", "--instance", &path, "--epsilon", "1.5", "--mu", "0.1",
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn simulate_emits_advice_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(dir.path(), "i.txt", "2\n1 100\n100 1\n");
    let advice_path = dir.path().join("advice.json");
    let predicted_path = dir.path().join("predicted.txt");
    let result = oap(&[
        "simulate", "--instance", &path, "--epsilon", "1", "--mu", "0.5",
        "--advice-out", advice_path.to_str().unwrap(),
        "--predicted-out", predicted_path.to_str().unwrap(),
    ]);
    assert!(result.status.success());

    let doc: oap_core::AdviceDocument =
        serde_json::from_str(&std::fs::read_to_string(advice_path).unwrap()).unwrap();
    assert_eq!(doc.delta, 50);
    assert_eq!(doc.total_error, 200);
    let predicted =
        oap_core::parse_orlib(&std::fs::read_to_string(predicted_path).unwrap()).unwrap();
    assert_eq!(predicted.entries(), &[51, 50, 50, 51]);
}

#[test]
fn sweep_desk_scale_counts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let result = oap(&[
            "sweep", "--sizes", "50,100", "--trials", "5", "--algorithms",
            "follow-prediction", "--out-dir", out.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{}", stderr(&result));
    }

    let trials = std::fs::read_to_string(out_a.join("trials.csv")).unwrap();
    // 2 sizes × 6 epsilons × 3 mus × 5 trials, one algorithm per row.
    assert_eq!(trials.lines().count(), 1 + 180);

    // ε = 0 rows carry ratio exactly 1.
    for line in trials.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[1] == "0" {
            assert_eq!(fields[7], "1", "bad row: {line}");
        }
    }

    let again = std::fs::read_to_string(out_b.join("trials.csv")).unwrap();
    assert_eq!(trials, again, "repeated sweep not byte-identical");

    for artifact in [
        "summary.csv",
        "timings.csv",
        "error_graph.csv",
        "size_graph.csv",
        "bounds_overlay.csv",
        "provenance.json",
    ] {
        assert!(out_a.join(artifact).exists(), "missing {artifact}");
    }
}

#[test]
fn sweep_all_failed_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write_instance(dir.path(), "flat.txt", "2\n5 5\n5 5\n");
    let out = dir.path().join("out");
    let result = oap(&[
        "sweep", "--files", &flat, "--epsilons", "0.5", "--mus", "0.5",
        "--trials", "2", "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(1));
    assert!(stderr(&result).contains("failed"));
}

#[test]
fn report_renders_bound_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    assert!(oap(&[
        "sweep", "--sizes", "50", "--trials", "3", "--out-dir",
        out.to_str().unwrap(),
    ])
    .status
    .success());
    let result = oap(&["report", "--dir", out.to_str().unwrap()]);
    assert!(result.status.success());
    let table = stdout(&result);
    assert!(table.contains("mean_ratio"));
    assert!(table.contains("below"));
    // μ = 0.1 rows stay below (ln n)² on every line.
    for line in table.lines().skip(1) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.get(2) == Some(&"0.1") {
            assert_eq!(fields[5], "below", "bad verdict line: {line}");
        }
    }
}

#[test]
fn report_on_empty_dir_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let result = oap(&["report", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn unknown_algorithm_is_a_usage_error() {
    let result = oap(&[
        "sweep", "--sizes", "10", "--trials", "1", "--algorithms", "magic",
    ]);
    assert_eq!(result.status.code(), Some(2));
}
