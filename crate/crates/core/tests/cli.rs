use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn vocal_bp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vocal-bp")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path) -> std::path::PathBuf {
    let spec = dir.join("spec.json");
    fs::write(&spec, r#"{"clips_per_class": 6, "duration_s": 0.6, "seed": 3}"#).unwrap();
    let corpus = dir.join("corpus");
    let out = vocal_bp(&["generate", "--spec", s(&spec), "--out", s(&corpus)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    corpus.join("manifest.csv")
}

#[test]
fn run_and_sweep_are_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generate(dir.path());
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"training_percent": 70, "epochs": 10, "seed": 5}"#).unwrap();
    let grid = dir.path().join("grid.json");
    fs::write(&grid, r#"{"base": {"seed": 5}, "training_percents": [60, 80], "epochs": [10, 20]}"#).unwrap();

    let mut reports = Vec::new();
    let mut sweeps = Vec::new();
    for i in 0..2 {
        let report = dir.path().join(format!("report{i}.json"));
        let out = vocal_bp(&["run", "--manifest", s(&manifest), "--config", s(&config), "--out", s(&report)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        reports.push(fs::read(&report).unwrap());

        let sweep_dir = dir.path().join(format!("sweep{i}"));
        let out = vocal_bp(&["sweep", "--manifest", s(&manifest), "--grid", s(&grid), "--out", s(&sweep_dir), "--plots"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        sweeps.push((
            fs::read(sweep_dir.join("sweep.csv")).unwrap(),
            fs::read(sweep_dir.join("failures.json")).unwrap(),
            fs::read(sweep_dir.join("plots/accuracy.svg")).unwrap(),
        ));
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(sweeps[0], sweeps[1]);

    let json: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    for key in ["davies_bouldin", "homogeneity", "completeness", "jaccard", "silhouette", "dunn", "accuracy"] {
        assert!(json[key].is_f64(), "missing {key}");
    }
    let csv = String::from_utf8(sweeps[0].0.clone()).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn features_command_writes_one_row_per_clip() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generate(dir.path());
    let table = dir.path().join("features.csv");
    let out = vocal_bp(&["features", "--manifest", s(&manifest), "--out", s(&table)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(table).unwrap();
    assert_eq!(text.lines().count(), 19);
}

#[test]
fn failures_are_reported_as_json_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, "{}").unwrap();
    let missing = dir.path().join("nope.csv");
    let report = dir.path().join("r.json");
    let out = vocal_bp(&["run", "--manifest", s(&missing), "--config", s(&config), "--out", s(&report)]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io_failure");
    assert!(!report.exists());

    let manifest = generate(dir.path());
    fs::write(&config, r#"{"training_percent": 45}"#).unwrap();
    let out = vocal_bp(&["run", "--manifest", s(&manifest), "--config", s(&config), "--out", s(&report)]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_config");
}
