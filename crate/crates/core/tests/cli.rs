//! End-to-end checks of the `bellstat` binary: exit codes, output stability,
//! and the documented file formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bellstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellstat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bellstat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir.join(name)
}

#[test]
fn violation_curve_csv_is_stable() {
    let output = bellstat(&[
        "violation-curve",
        "--gamma",
        "0.7071067811865476",
        "--S",
        "0",
        "--S",
        "2.8284271247461903",
        "--n-min",
        "1",
        "--n-max",
        "3",
    ]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "S,N,p_exact,p_gauss");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("0.00000000000e0,1,1.00000000000e0,1.00000000000e0"));
    assert!(!text.contains('\r'));

    // Byte-identical across runs.
    let again = bellstat(&[
        "violation-curve",
        "--gamma",
        "0.7071067811865476",
        "--S",
        "0",
        "--S",
        "2.8284271247461903",
        "--n-min",
        "1",
        "--n-max",
        "3",
    ]);
    assert_eq!(output.stdout, again.stdout);
}

#[test]
fn violation_curve_json_document() {
    let output = bellstat(&[
        "violation-curve",
        "--gamma",
        "0.7071067811865476",
        "--S",
        "2",
        "--n-min",
        "10",
        "--n-max",
        "10",
        "--format",
        "json",
    ]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["rows"][0]["n"], 10);
    assert!(doc["rows"][0]["p_exact"].is_number());
}

#[test]
fn violation_curve_reads_config_file() {
    let config = temp_path("sweep.json");
    std::fs::write(
        &config,
        r#"{
            "gamma": 0.7071067811865476,
            "s_values": [0.0, {"state": "singlet", "settings": "chsh-optimal"}],
            "n_min": 1,
            "n_max": 2,
            "outputs": "exact"
        }"#,
    )
    .unwrap();
    let out_file = temp_path("sweep.csv");
    let output = bellstat(&[
        "violation-curve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out_file).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "S,N,p_exact");
    assert_eq!(lines.len(), 5);
    assert!(lines[3].starts_with("2.82842712475e0,1,"));
}

#[test]
fn exit_codes_follow_the_contract() {
    // Usage error: unknown flag (clap) and missing required inputs.
    let output = bellstat(&["violation-curve", "--n-min", "1"]);
    assert_eq!(output.status.code(), Some(2));
    let output = bellstat(&["simulate", "--N", "10", "--gamma", "0.5"]);
    assert_eq!(output.status.code(), Some(2));

    // Numerical domain error: gamma out of range.
    let output = bellstat(&["violation-curve", "--gamma", "1.5", "--S", "0"]);
    assert_eq!(output.status.code(), Some(3));

    // Domain error: no two-point law at |gamma^2 S| > 2.
    let output = bellstat(&["simulate", "--N", "5", "--gamma", "1.0", "--S", "3.0"]);
    assert_eq!(output.status.code(), Some(3));

    // Unknown state name.
    let output = bellstat(&["invert", "--gamma", "0.7", "--state", "nope", "--settings", "all-z"]);
    assert_eq!(output.status.code(), Some(3));

    // Success.
    let output = bellstat(&["selfcheck"]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn simulate_text_report_shape() {
    let output = bellstat(&[
        "simulate", "--N", "1", "--reps", "1000", "--gamma", "0.7071", "--S", "0", "--seed", "7",
    ]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("empirical_rate: 1.00000000000e0"));
    assert!(text.contains("within_band: true"));
}

#[test]
fn invert_from_distribution_file() {
    // The singlet's noisy joint written to disk and inverted from the file
    // must flag both joint- and s-level negativity.
    let gamma = std::f64::consts::FRAC_1_SQRT_2;
    let gammas = bellstat::noise::GammaFactors::equal(gamma).unwrap();
    let joint = bellstat::quantum::noisy_joint_distribution(
        &bellstat::quantum::TwoQubitState::singlet(),
        &bellstat::quantum::MeasurementSettings::chsh_optimal(),
        &gammas,
    )
    .unwrap();
    let path = temp_path("joint.json");
    std::fs::write(
        &path,
        serde_json::to_string(&serde_json::json!({ "probabilities": joint.as_array().to_vec() }))
            .unwrap(),
    )
    .unwrap();

    let output = bellstat(&[
        "invert",
        "--gamma",
        "0.7071067811865476",
        "--dist",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(doc["negativity"], true);
    assert_eq!(doc["joint_negativity"], true);
    assert_eq!(doc["bell_violated"], true);
    let s = doc["s"].as_f64().unwrap();
    assert!((s - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);

    // gamma = 0 must be refused as a singular inversion.
    let output = bellstat(&["invert", "--gamma", "0", "--dist", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn selfcheck_reports_every_suite() {
    let output = bellstat(&["selfcheck"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    for suite in [
        "kernel-composition",
        "forward-stochasticity",
        "mean-contraction",
        "joint-round-trip",
        "s-dichotomy",
        "quantum-chain",
        "route-equivalence",
        "negativity-criterion",
    ] {
        assert!(text.contains(&format!("{suite}: PASS")), "missing {suite} in:\n{text}");
    }
    assert!(text.trim_end().ends_with("selfcheck: PASS"));
}
