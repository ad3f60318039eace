use std::process::Command;

use uavcre::experiments::DEFAULT_CONFIG;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uavcre"))
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> std::path::PathBuf {
    let path = dir.path().join("experiment.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn coverage_sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<Vec<u8>> = ["a.csv", "b.csv"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let status = bin()
                .args(["coverage-sweep", "--trials", "200", "--seed", "17", "--out"])
                .arg(&out)
                .status()
                .unwrap();
            assert!(status.success());
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs[0].clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gamma_dB,analytic_cre,analytic_simplified_gain,empirical_cre,empirical_map"
    );
    assert_eq!(lines.count(), 31);
    assert!(!text.contains('\r'));
}

#[test]
fn negative_density_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = DEFAULT_CONFIG.replacen("density_per_km2 = 500.0", "density_per_km2 = -500.0", 1);
    assert_ne!(bad, DEFAULT_CONFIG);
    let out = bin()
        .args(["se-vs-antennas", "--config"])
        .arg(write_config(&dir, &bad))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[mmwave]"));
}

#[test]
fn unknown_key_and_bad_flag_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = DEFAULT_CONFIG.replacen("[network]", "[network]\nheigth_m = 3", 1);
    let out = bin()
        .args(["coverage-sweep", "--config"])
        .arg(write_config(&dir, &bad))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let code = bin().args(["coverage-sweep", "--policy", "beta=abc"]).output().unwrap().status.code();
    assert_eq!(code, Some(2));
}

#[test]
fn quadrature_budget_exhaustion_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let text = DEFAULT_CONFIG.replacen("max_subdivisions = 2000", "max_subdivisions = 1", 1);
    assert_ne!(text, DEFAULT_CONFIG);
    let out = bin()
        .args(["se-vs-antennas", "--trials", "10", "--config"])
        .arg(write_config(&dir, &text))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn map_policy_flag_sets_unit_bias() {
    let out = bin()
        .args(["se-vs-antennas", "--trials", "50", "--policy", "map"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[1], 1.0);
        assert_eq!(cells[2], cells[3]);
    }
}

/// Reduced trials widen the statistical bounds instead of failing.
#[test]
fn validate_with_few_trials_passes_and_reports_json() {
    let out = bin().args(["validate", "--trials", "100"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    let cre = checks
        .iter()
        .find(|c| c["name"] == "empirical CRE coverage at 0 dB")
        .unwrap();
    assert!((cre["tolerance"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

/// A network far from the reference profile misses the fixed coverage
/// targets, and the run says so through its exit status.
#[test]
fn validate_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = DEFAULT_CONFIG
        .replacen("tx_power_dbm = 40.0", "tx_power_dbm = 0.0", 1)
        .replacen("trials = 10000", "trials = 2000", 1);
    assert_ne!(text, DEFAULT_CONFIG);
    let out = bin()
        .args(["validate", "--config"])
        .arg(write_config(&dir, &text))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}
