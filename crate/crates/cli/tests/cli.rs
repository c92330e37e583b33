use std::path::Path;
use std::process::{Command, Output};

use evidal_cli::commands::al_run::ResultsFile;

fn evidal(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evidal"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn unknown_flag_exits_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = evidal(dir.path(), &["al-run", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(evidal(dir.path(), &[]).status.code(), Some(2));
    assert_eq!(evidal(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn landscape_writes_csv_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let out = evidal(
        dir.path(),
        &[
            "landscape",
            "--kind",
            "three_class_imprecise",
            "--measure",
            "klir",
            "--lambda",
            "0.2",
            "--resolution",
            "30",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("landscape/three_class_imprecise_klir.csv"))
        .unwrap();
    assert_eq!(csv.lines().count(), 30);
    assert!(csv.lines().all(|l| l.split(',').count() == 30));
    let pgm = std::fs::read(dir.path().join("landscape/three_class_imprecise_klir.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n30 30\n65535\n"));
}

#[test]
fn landscape_rejects_bad_lambda_and_unsupported_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out = evidal(
        dir.path(),
        &["landscape", "--kind", "line", "--lambda", "1.5"],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = evidal(
        dir.path(),
        &[
            "landscape",
            "--kind",
            "three_class_imprecise",
            "--measure",
            "rl_epistemic",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = evidal(dir.path(), &["landscape", "--kind", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schema_errors_exit_2_with_path() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(
        dir.path(),
        "bad.json",
        r#"{ "datasets": ["iris"], "strategies": [{"kind": "klir", "klir_lambda": 1.5}] }"#,
    );
    let out = evidal(dir.path(), &["al-run", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(".strategies[0].klir_lambda"));

    write_spec(
        dir.path(),
        "rl.json",
        r#"{ "datasets": ["iris"], "strategies": ["rl_epistemic"] }"#,
    );
    let out = evidal(dir.path(), &["al-run", "--config", "rl.json"]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn missing_dataset_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(
        dir.path(),
        "spec.json",
        r#"{ "datasets": ["no_such_data"], "strategies": ["random"] }"#,
    );
    let out = evidal(dir.path(), &["al-run", "--config", "spec.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn al_run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(
        dir.path(),
        "spec.json",
        r#"{ "datasets": ["iris", "line", "circle"], "strategies": ["random", "klir", "entropy[pknn]"],
             "config": {"repetitions": 3, "budget_fraction": 0.3}, "seed": 5 }"#,
    );
    let out = evidal(
        dir.path(),
        &[
            "al-run",
            "--config",
            "spec.json",
            "--out",
            "res",
            "--timings",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let results: ResultsFile = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("res/results.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(results.runs.len(), 9);
    assert_eq!(results.experiment.seed, 5);
    assert_eq!(results.version, evidal_cli::VERSION);
    assert!(results
        .runs
        .iter()
        .all(|r| r.config.seed == 5 && r.repetitions.len() == 3));
    let timings = std::fs::read_to_string(dir.path().join("res/timings.csv")).unwrap();
    assert_eq!(timings.lines().count(), 1 + 9 * 3);
    let curves = std::fs::read_to_string(dir.path().join("res/curves.csv")).unwrap();
    assert!(curves.starts_with("dataset,strategy,repetition,step,labeled_count,accuracy\n"));

    let out = evidal(dir.path(), &["report", "res", "--out", "rep"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let md = std::fs::read_to_string(dir.path().join("rep/report.md")).unwrap();
    assert_eq!(
        md.lines()
            .filter(|l| l.starts_with("| iris |") || l.starts_with("| line |"))
            .count(),
        2
    );
    let cd = std::fs::read_to_string(dir.path().join("rep/cd.csv")).unwrap();
    assert_eq!(cd.lines().count(), 1 + 3);

    let out = evidal(
        dir.path(),
        &[
            "cd",
            "res/results.json",
            "--out",
            "cd",
            "--alternative",
            "one-sided",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("cd/cd.json").is_file());
}

#[test]
fn report_on_one_dataset_writes_table_only() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(
        dir.path(),
        "spec.json",
        r#"{ "datasets": ["sine"], "strategies": ["random", "evid_epistemic"], "config": {"repetitions": 2, "budget_fraction": 0.2} }"#,
    );
    assert!(evidal(dir.path(), &["al-run", "--config", "spec.json"])
        .status
        .success());
    let out = evidal(dir.path(), &["report", "results"]);
    assert!(out.status.success());
    assert!(dir.path().join("report/report.md").is_file());
    assert!(!dir.path().join("report/cd.csv").exists());
    assert_eq!(
        evidal(dir.path(), &["cd", "results"]).status.code(),
        Some(1)
    );
}

#[test]
fn selfcheck_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = evidal(dir.path(), &["selfcheck"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}
