//! End-to-end behaviour of the `gpi-harness` binary: output files, exit
//! codes and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn harness(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpi-harness"))
        .args(args)
        .env("GPI_HARNESS_OUT", out_dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SANDWICH: &str = r#"{
  "schema_version": 1,
  "experiment_id": "cli-sandwich",
  "inequality_id": "sandwich",
  "d": 3,
  "block_sizes": [1, 1, 1],
  "alpha": 5.0,
  "sigma": { "random": { "count": 4 } },
  "exponents": { "values": [0.4, 0.4, 0.4] },
  "n_samples": 20000,
  "seed": 5
}"#;

#[test]
fn run_writes_csv_and_json_then_reproduces_them() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", SANDWICH);
    let first = harness(&["run", "--config", &config, "--workers", "1"], dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let csv_path = dir.path().join("cli-sandwich.csv");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(!csv.contains('\r'));
    // header plus count × (d − 1) rows
    assert_eq!(csv.lines().count(), 1 + 4 * 2);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(csv_path.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 8);
    assert_eq!(json["sigmas"].as_array().unwrap().len(), 4);

    let second = harness(&["run", "--config", &config, "--workers", "2"], dir.path());
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), csv);
}

#[test]
fn window_violation_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    // ν = 3 ≥ α/2 for α = 5 leaves the moment window
    let body = SANDWICH.replace("[0.4, 0.4, 0.4]", "[3.0, 0.4, 0.4]");
    let config = write_config(dir.path(), "bad.json", &body);
    let out = harness(&["run", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert!(!dir.path().join("cli-sandwich.csv").exists());
    assert!(!dir.path().join("cli-sandwich.json").exists());
}

#[test]
fn parse_errors_report_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let body = SANDWICH.replace("\"seed\": 5", "\"seed\": 5,\n  \"sed\": 1");
    let config = write_config(dir.path(), "typo.json", &body);
    let out = harness(&["run", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn moments_prints_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    // E X^1 for a 1×1 Wishart with α = 3 and Σ = 1 is α
    let out = harness(&["moments", "--alpha", "3", "--p", "1", "--nu", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let moment: f64 = text.lines().find_map(|l| l.strip_prefix("moment = ")).unwrap().parse().unwrap();
    assert!((moment - 3.0).abs() < 1e-12, "{text}");
    let bad = harness(&["moments", "--alpha", "3", "--p", "1", "--nu", "-2"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sample_emits_draws_per_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", SANDWICH);
    let out = harness(&["sample", "--config", &config, "--count", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let sets: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let sets = sets.as_array().unwrap();
    assert_eq!(sets.len(), 4);
    for s in sets {
        let draws = s["draws"].as_array().unwrap();
        assert_eq!(draws.len(), 3);
        assert_eq!(draws[0].as_array().unwrap().len(), 9);
    }
}

#[test]
fn unknown_suite_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = harness(&["verify", "--suite", "everything"], dir.path());
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn shipped_configs_validate() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        gpi_harness::ExperimentConfig::load(&path)
            .and_then(|c| c.plan())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 3);
}
