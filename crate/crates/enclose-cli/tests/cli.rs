//! Behavior of the `enclose` binary: files, exit codes, schema diagnostics,
//! environment overrides and the CSV round trip.

use enclose_cli::output::{read_csv, read_metrics, write_csv};
use enclose_core::simulator::{run_scenario, BuiltinCase, ScenarioConfig};
use std::path::Path;
use std::process::Command;

fn enclose() -> Command {
    Command::new(env!("CARGO_BIN_EXE_enclose"))
}

fn metrics_value(path: &Path, key: &str) -> String {
    read_metrics(path)
        .unwrap()
        .into_iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("missing key {key}"))
        .1
}

const CASE3_TOML: &str = r#"
[pursuer]
x_m = -100.0
y_m = 0.0
heading_rad = 0.3490658503988659
speed_mps = 40.0

[target]
x_m = 0.0
y_m = 0.0
heading_rad = 0.6981317007977318
speed_mps = 10.0

[reference]
kind = "constant"
radius_m = 75.0

[maneuver]
kind = "product_sinusoid"
bias_mps2 = 1.5
scale_mps2 = -5.0
cos_frequency_radps = 0.6283185307179586
sin_frequency_radps = 0.3141592653589793

[integration]
dt_s = 0.001
horizon_s = 2.0
curvature_known = true
"#;

#[test]
fn simulate_runs_a_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("orbit3.toml");
    std::fs::write(&cfg_path, CASE3_TOML).unwrap();
    let status = enclose()
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = dir.path().join("orbit3_trajectory.csv");
    let metrics = dir.path().join("orbit3_metrics.txt");
    assert!(csv.exists() && metrics.exists());
    assert_eq!(metrics_value(&metrics, "steps"), "2000");
    assert_eq!(metrics_value(&metrics, "monitors_passed"), "true");
    assert_eq!(read_csv(&csv).unwrap().len(), 201);
}

#[test]
fn scenario_file_can_name_its_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("named.toml");
    let toml = format!("{CASE3_TOML}\n[output]\ndecimation = 20\ncsv = \"flight.csv\"\nmetrics = \"flight.txt\"\n");
    std::fs::write(&cfg_path, toml).unwrap();
    let status = enclose()
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("flight.csv").exists());
    assert_eq!(metrics_value(&dir.path().join("flight.txt"), "decimation"), "20");
}

#[test]
fn malformed_config_gives_schema_diagnostics_and_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    std::fs::write(&cfg_path, CASE3_TOML.replace("radius_m", "radius_furlongs")).unwrap();
    let output = enclose()
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("radius_furlongs") || stderr.contains("radius_m"),
        "diagnostics missing field name: {stderr}"
    );
}

#[test]
fn builtin_case_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let status = enclose()
        .args(["case2", "--horizon", "1.5", "--decimation", "5"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let metrics = dir.path().join("case2_metrics.txt");
    assert_eq!(metrics_value(&metrics, "steps"), "1500");
    assert_eq!(metrics_value(&metrics, "scenario"), "case2");
    let records = read_csv(&dir.path().join("case2_trajectory.csv")).unwrap();
    assert_eq!(records.len(), 301);
    // First record is the initial condition.
    assert_eq!(records[0].t, 0.0);
    assert_eq!(records[0].s, 0.0);
}

#[test]
fn env_variables_override_flags() {
    let dir = tempfile::tempdir().unwrap();
    let status = enclose()
        .arg("case4")
        .arg("--out")
        .arg(dir.path())
        .env("ENCLOSE_HORIZON", "1.0")
        .env("ENCLOSE_DECIMATION", "100")
        .status()
        .unwrap();
    assert!(status.success());
    let metrics = dir.path().join("case4_metrics.txt");
    assert_eq!(metrics_value(&metrics, "steps"), "1000");
    assert_eq!(metrics_value(&metrics, "decimation"), "100");
}

#[test]
fn csv_round_trip_is_exact() {
    let mut cfg = ScenarioConfig::builtin(BuiltinCase::Case1);
    cfg.horizon = 1.0;
    let (log, _) = run_scenario(&cfg, 25).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trip.csv");
    write_csv(&log, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back, log.records);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let status = enclose()
            .args(["case3", "--horizon", "2.0"])
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let bytes_a = std::fs::read(dir_a.path().join("case3_trajectory.csv")).unwrap();
    let bytes_b = std::fs::read(dir_b.path().join("case3_trajectory.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn check_gains_exit_codes() {
    let ok = enclose()
        .args(["check-gains", "--alpha1", "10", "--alpha2", "10"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS"));

    let bad = enclose()
        .args(["check-gains", "--alpha1", "0"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
}

#[test]
fn check_ranks_reports_singular_neighborhoods() {
    let output = enclose()
        .args(["check-ranks", "--step-deg", "15"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("0.00"), "{stdout}");
    assert!(stdout.contains("180.00"), "{stdout}");
}

#[test]
fn aborted_run_preserves_partial_csv_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("collapse.toml");
    let toml = format!(
        "{CASE3_TOML}\n[weights]\nq_rho = 1e8\nq_rho_dot = 1e8\nr_accel = 4e4\nlambda_per_s = 0.9\n"
    );
    let toml = toml.replace("horizon_s = 2.0", "horizon_s = 9.0");
    std::fs::write(&cfg_path, toml).unwrap();
    let output = enclose()
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("auxiliary state collapse"), "{stderr}");
    let partial = read_csv(&dir.path().join("collapse_trajectory.csv")).unwrap();
    assert!(!partial.is_empty());
    // Metrics are not produced for an aborted run.
    assert!(!dir.path().join("collapse_metrics.txt").exists());
}

#[test]
fn sweep_emits_a_metrics_table() {
    let dir = tempfile::tempdir().unwrap();
    let status = enclose()
        .args(["sweep", "--horizon", "1.0", "--dts", "0.001,0.002"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let table = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 9, "header + 4 cases x 2 dts");
    assert!(lines[0].starts_with("case,dt_s"));
    assert!(lines[1..].iter().any(|l| l.starts_with("case4,2.0")));
}
