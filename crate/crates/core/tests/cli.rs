use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use spectral_maslov::cli::{run_suite, RunOptions, ScenarioFile};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectral-maslov"))
}

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn compute(kind: &str, file: &Path, extra: &[&str]) -> Output {
    bin().arg("compute").arg(kind).arg(file).args(extra).output().unwrap()
}

#[test]
fn compute_linear_path() {
    let o = compute("sf", &manifest("instances/linear_1x1.json"), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn compute_rotating_lagrangian() {
    let o = compute("maslov", &manifest("instances/rotating_lagrangian.json"), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-1");
}

#[test]
fn compute_worked_reduction_with_tracks() {
    let dir = tempfile::tempdir().unwrap();
    let tracks = dir.path().join("tracks.txt");
    let o = compute(
        "reduce",
        &manifest("instances/worked_reduction.json"),
        &["--emit-tracks", tracks.to_str().unwrap(), "--track-samples", "5"],
    );
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines, ["mu 1", "mu_reduced 1", "lhs 0", "rhs 0", "defect 0"]);
    let text = std::fs::read_to_string(&tracks).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(!rows.is_empty());
    // t followed by two chart eigenvalues, sorted
    assert!(rows.iter().all(|r| r.len() == 3 && r[1] <= r[2]));
}

#[test]
fn mismatched_kind_is_a_parse_error() {
    let o = compute("maslov", &manifest("instances/linear_1x1.json"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_and_unknown_fields_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(bin().arg("run").arg(&bad).output().unwrap().status.code(), Some(2));

    let unknown = dir.path().join("unknown.json");
    std::fs::write(
        &unknown,
        r#"{"schema_version":"1","kind":"index","parameters":{"seed":1,"trials":2,"colour":"red"}}"#,
    )
    .unwrap();
    assert_eq!(bin().arg("run").arg(&unknown).output().unwrap().status.code(), Some(2));

    let version = dir.path().join("version.json");
    std::fs::write(&version, r#"{"schema_version":"9","kind":"index","parameters":{"seed":1,"trials":2}}"#).unwrap();
    assert_eq!(bin().arg("run").arg(&version).output().unwrap().status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    assert_eq!(bin().arg("run").arg(&missing).output().unwrap().status.code(), Some(2));
}

#[test]
fn non_coisotropic_reduction_is_a_numeric_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(manifest("instances/worked_reduction.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    // span(e1) is isotropic, not coisotropic, in dimension 4
    v["instance"]["w"] = serde_json::json!([[1.0], [0.0], [0.0], [0.0]]);
    let file = dir.path().join("iso.json");
    std::fs::write(&file, serde_json::to_string(&v).unwrap()).unwrap();
    let o = compute("reduce", &file, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn run_writes_report_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = bin()
        .arg("run")
        .arg(manifest("scenarios/index.json"))
        .args(["--trials", "7", "--seed", "5", "--dims", "3-4", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["environment"]["seed"], 5);
    assert_eq!(report["aggregate"]["trials"], 7);
    assert_eq!(report["aggregate"]["passed"], true);
    assert!(report["aggregate"].get("wall_time_s").is_none());
    let trials = report["trials"].as_array().unwrap();
    assert!(trials.iter().all(|t| (3..=4).contains(&t["details"]["n"].as_u64().unwrap())));
    assert!(trials.iter().all(|t| t["digest"].as_str().unwrap().len() == 16));
}

#[test]
fn jobs_do_not_change_stdout() {
    let run = |jobs: &str| {
        bin()
            .arg("run")
            .arg(manifest("scenarios/maslov.json"))
            .args(["--trials", "12", "--jobs", jobs])
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn failing_report_exit_codes() {
    let mut s = ScenarioFile::parse(&std::fs::read_to_string(manifest("scenarios/index.json")).unwrap()).unwrap();
    s.parameters.trials = 3;
    let mut r = run_suite(&s, &RunOptions::default()).unwrap();
    assert_eq!(r.exit_code(), 0);
    r.aggregate.failures = 1;
    assert_eq!(r.exit_code(), 1);
    r.aggregate.errors = 1;
    assert_eq!(r.exit_code(), 3);
}
