//! End-to-end runs of the binary against the bundled fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn qdt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).expect("config written");
    path
}

#[test]
fn empty_config_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, "empty.toml", "");
    let output = qdt(&["predict", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2), "{}", stderr(&output));
}

#[test]
fn missing_file_is_an_input_error() {
    let output = qdt(&["predict", "/nonexistent/qdt.toml"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn bad_probability_sum_names_the_lottery() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "bad.toml",
        r#"
schema = "qdt-experiment/1"

[[lottery]]
label = "broken"
outcomes = [[6.0, 0.45], [0.0, 0.53]]

[[lottery]]
label = "fine"
outcomes = [[3.0, 0.9], [0.0, 0.1]]
"#,
    );
    let output = qdt(&["predict", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("broken"), "{}", stderr(&output));
}

#[test]
fn predict_reports_the_first_experiment() {
    let output = qdt(&["predict", fixture("kt_pair1.toml").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("label risky"));
    assert!(text.contains("p 0.25"));
    assert!(text.contains("p 0.75"));
    assert!(text.contains("max_abs_deviation 0.1"), "{text}");
}

#[test]
fn record_streams_are_byte_identical_across_runs() {
    let path = fixture("kt_pair1.toml");
    let first = qdt(&["predict", path.to_str().unwrap(), "--format", "records"]);
    let second = qdt(&["predict", path.to_str().unwrap(), "--format", "records"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn validate_passes_the_bundled_quantum_fixtures() {
    for name in ["product_state.toml", "correlated_state.toml", "dimB1.toml"] {
        let output = qdt(&["validate", fixture(name).to_str().unwrap()]);
        assert_eq!(output.status.code(), Some(0), "{name}: {}", stderr(&output));
    }
}

#[test]
fn validate_without_a_quantum_section_is_an_input_error() {
    let output = qdt(&["validate", fixture("kt_pair1.toml").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("quantum"), "{}", stderr(&output));
}

#[test]
fn quarterlaw_with_few_samples_reports_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "small.toml",
        r#"
schema = "qdt-experiment/1"

[quarterlaw]
lattice_size = 2
samples = 10
seed = 7

[quarterlaw.family]
kind = "uniform"
lo = 0.0
hi = 0.5
"#,
    );
    let output = qdt(&["quarterlaw", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("standard_error"));
}

#[test]
fn seed_flag_overrides_the_config() {
    let path = fixture("quarterlaw_uniform.toml");
    let config_seed = qdt(&["quarterlaw", path.to_str().unwrap(), "--format", "records"]);
    let flag_seed = qdt(&[
        "quarterlaw",
        path.to_str().unwrap(),
        "--seed",
        "43",
        "--format",
        "records",
    ]);
    assert_eq!(config_seed.status.code(), Some(0));
    assert_eq!(flag_seed.status.code(), Some(0));
    assert_ne!(config_seed.stdout, flag_seed.stdout);
    assert!(stdout(&flag_seed).contains("seed 43"));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let output = qdt(&[
        "predict",
        fixture("kt_pair2.toml").to_str().unwrap(),
        "--format",
        "records",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).is_empty());
    let written = std::fs::read_to_string(&out).expect("report file");
    assert!(written.contains("command predict"));
    assert!(written.contains("p=7.50000000000e-1"));
}

#[test]
fn theta_flag_flips_the_first_experiment_ranking() {
    let path = fixture("kt_pair1.toml");
    let output = qdt(&[
        "predict",
        path.to_str().unwrap(),
        "--theta",
        "0.5",
        "--format",
        "records",
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("order=\"0,1\""), "{text}");
    assert!(
        text.contains("label=\"risky\" expected_utility=2.70000000000e0 f=5.00000000000e-1 q=2.50000000000e-1 p=7.50000000000e-1"),
        "{text}"
    );
}

#[test]
fn explicit_ranking_override_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "override.toml",
        r#"
schema = "qdt-experiment/1"

[[lottery]]
label = "risky"
outcomes = [[6.0, 0.45], [0.0, 0.55]]

[[lottery]]
label = "safe"
outcomes = [[3.0, 0.9], [0.0, 0.1]]

[attraction]
ranking = [0, 1]
"#,
    );
    let output = qdt(&["predict", path.to_str().unwrap(), "--format", "records"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("order=\"0,1\""), "{}", stdout(&output));
}

#[test]
fn unknown_preset_is_an_input_error_listing_the_presets() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "preset.toml",
        r#"
schema = "qdt-experiment/1"

[quantum]
dim_a = 2
dim_b = 2
state = "thermal"
"#,
    );
    let output = qdt(&["validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(err.contains("thermal") && err.contains("maximally_mixed"), "{err}");
}

#[test]
fn predict_with_a_quantum_section_appends_the_invariant_battery() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "joint.toml",
        r#"
schema = "qdt-experiment/1"

[[lottery]]
label = "risky"
outcomes = [[6.0, 0.45], [0.0, 0.55]]

[[lottery]]
label = "safe"
outcomes = [[3.0, 0.9], [0.0, 0.1]]

[quantum]
dim_a = 2
dim_b = 2
state = "maximally_mixed"
"#,
    );
    let output = qdt(&["predict", path.to_str().unwrap(), "--format", "records"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("section=gate"), "{text}");
    assert!(text.contains("section=operator"), "{text}");
}

#[test]
fn predict_rejects_a_quantum_section_of_the_wrong_width() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "width.toml",
        r#"
schema = "qdt-experiment/1"

[[lottery]]
label = "risky"
outcomes = [[6.0, 0.45], [0.0, 0.55]]

[[lottery]]
label = "safe"
outcomes = [[3.0, 0.9], [0.0, 0.1]]

[quantum]
dim_a = 3
dim_b = 2
state = "maximally_mixed"
"#,
    );
    let output = qdt(&["predict", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("dim_a"), "{}", stderr(&output));
}

#[test]
fn explicit_matrix_states_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "matrix.toml",
        r#"
schema = "qdt-experiment/1"

[quantum]
dim_a = 2
dim_b = 1
state = [
  [[0.5, 0.0], [0.0, 0.0]],
  [[0.0, 0.0], [0.5, 0.0]],
]
"#,
    );
    let output = qdt(&["validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
}

#[test]
fn non_density_matrix_states_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "trace.toml",
        r#"
schema = "qdt-experiment/1"

[quantum]
dim_a = 2
dim_b = 1
state = [
  [[0.9, 0.0], [0.0, 0.0]],
  [[0.0, 0.0], [0.5, 0.0]],
]
"#,
    );
    let output = qdt(&["validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2), "{}", stderr(&output));
}

#[test]
fn correlated_probe_preset_disarms_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "probe.toml",
        r#"
schema = "qdt-experiment/1"

[quantum]
dim_a = 2
dim_b = 2
state = "correlated_probe"
"#,
    );
    let output = qdt(&["validate", path.to_str().unwrap(), "--format", "records"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("q_must_vanish=false"), "{text}");
    assert!(text.contains("state_product=false"), "{text}");
}
