use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ternary_stability::harness::{ExperimentConfig, ExperimentReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ternstab"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_fixture_passes_with_json_report() {
    let path = fixture("linearity");
    let o = run(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: ExperimentReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report.passed);
    assert_eq!(report.config, ExperimentConfig::load(&path).unwrap());
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS"));
}

#[test]
fn csv_has_one_row_per_law() {
    let o = run(&["verify-axioms", "--algebra", "diag:5", "--samples", "200", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scenario,law,max_violation,threshold,pass"));
    let rows: Vec<&str> = lines.collect();
    let json = run(&["verify-axioms", "--algebra", "diag:5", "--samples", "200"]);
    let report: ExperimentReport = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(rows.len(), report.laws.len());
    assert!(rows.iter().all(|r| r.starts_with("axioms,") && r.ends_with(",true")));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args =
        ["stabilize", "--form", "product", "--r", "0.25", "--theta-empirical", "2000", "--samples", "10"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_config_round_trips_through_the_loader() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["counterexample", "--samples", "1000", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let report: ExperimentReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.series.as_ref().is_some_and(|s| !s.is_empty()));

    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, report.config.to_json().unwrap()).unwrap();
    let again = run(&["run", "--config", config_path.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(stdout(&again), std::fs::read_to_string(&out).unwrap());
}

#[test]
fn failing_checks_exit_with_one() {
    // An analytic θ far below the bump's true level breaks the near-bound law.
    let o = run(&["stabilize", "--theta", "1e-6", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let report: ExperimentReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!report.passed);
    assert!(!report.law("near_bound").unwrap().pass);
    assert!(String::from_utf8_lossy(&o.stderr).contains("near_bound"));

    let o = run(&["linearity", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn configuration_errors_exit_with_two() {
    let cases: [&[&str]; 6] = [
        &["stabilize", "--r", "2"],
        &["derivation", "--algebra", "diag:3"],
        &["isomorphism", "--algebra", "module:3"],
        &["verify-axioms", "--tol", "0"],
        &["stabilize", "--theta", "1", "--theta-empirical", "10"],
        &["verify-axioms", "--algebra", "tensor:2"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.json");
    assert_eq!(run(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixture("axioms")).unwrap().replace("\"seed\"", "\"sede\"");
    std::fs::write(&bad, text).unwrap();
    let o = run(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
}
