use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bergman-lab"))
}

#[test]
fn list_names_every_experiment() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["b1-implies-bp", "regularization-chain", "counterexample-psi1", "lower-bound-trend", "uniform-domain-equivalence", "weak-type"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn preset_prints_loadable_json() {
    let out = bin().args(["preset", "weak-type"]).output().unwrap();
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let run = bin()
        .args(["run", "--experiment", "weak-type", "--depth-max", "5", "--format", "human", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.contains("exit status 0"));
    // timing only goes to stderr
    assert!(!text.contains("wall-clock"));
    assert!(String::from_utf8(run.stderr).unwrap().contains("wall-clock"));
}

#[test]
fn run_writes_csv_and_text_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--experiment", "b1-implies-bp", "--depth-max", "5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for f in ["b1-implies-bp_profile.csv", "b1-implies-bp_verdicts.csv", "b1-implies-bp_config.json", "b1-implies-bp.txt"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let csv = std::fs::read_to_string(dir.path().join("b1-implies-bp_profile.csv")).unwrap();
    assert!(csv.starts_with("depth,"));
}

#[test]
fn invalid_exponent_exits_with_error() {
    let out = bin().args(["run", "--experiment", "b1-implies-bp", "--p", "1.0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("1 < p"));
}

#[test]
fn unknown_experiment_is_rejected() {
    let out = bin().args(["run", "--experiment", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
