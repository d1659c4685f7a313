// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Integration tests of the command-line surface: envelope contents, CSV
//! schemas, config-file precedence, exit codes, and error reporting. Most
//! cases drive the compiled binary end to end; file-writing cases also use
//! the in-process entry point.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sqzsync"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}, got {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().expect("process exits normally"),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn data_rows<'a>(text: &'a str, header: &str) -> Vec<&'a str> {
    assert!(
        text.lines().any(|l| l == header),
        "missing header {header} in output:\n{text}"
    );
    text.lines()
        .filter(|l| !l.starts_with('#') && *l != header && !l.is_empty())
        .collect()
}

fn meta_value<'a>(text: &'a str, key: &str) -> &'a str {
    let prefix = format!("# {key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(prefix.as_str()))
        .unwrap_or_else(|| panic!("missing metadata key {key} in:\n{text}"))
}

#[test]
fn steady_envelope_reports_the_squeezed_vacuum_state() {
    let out = run_ok(&["steady", "--n", "0", "--r", "1.5", "--eps", "0.5"]);
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["tool"], "sqzsync");
    assert_eq!(v["command"], "steady");
    assert_eq!(v["params"]["r"], 1.5);
    assert_eq!(v["data"]["kind"], "steady");
    let x = v["data"]["state"]["x"].as_f64().unwrap();
    let y = v["data"]["state"]["y"].as_f64().unwrap();
    assert!((x - (-0.9987621580633642)).abs() <= 1e-12, "x = {x}");
    assert_eq!(y, 0.0);
    let s = v["data"]["s_max"].as_f64().unwrap();
    assert!((s - 0.12484526975792053).abs() <= 1e-12, "s_max = {s}");
    let phi_star = v["data"]["phi_star"].as_f64().unwrap();
    assert!((phi_star - std::f64::consts::PI).abs() <= 1e-12);
    let gap = v["data"]["route_agreement"].as_f64().unwrap();
    assert!(gap <= 1e-12, "route gap {gap}");
    // Derived reservoir block is present for downstream tooling.
    assert!((v["derived"]["n_eff"].as_f64().unwrap() - 4.533830997888883).abs() <= 1e-12);
}

#[test]
fn eopt_envelope_uses_the_closed_route_on_the_resonant_slice() {
    let out = run_ok(&["eopt", "--n", "0", "--r", "1.5"]);
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["data"]["kind"], "epsilon_opt");
    assert_eq!(v["data"]["route"], "closed");
    let eps = v["data"]["eps"].as_f64().unwrap();
    assert!((eps - 0.5006193045060953).abs() <= 1e-9, "eps_opt = {eps}");

    let out = run_ok(&["eopt", "--n", "0", "--r", "1.5", "--delta", "0.3"]);
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["data"]["route"], "numeric");
}

#[test]
fn cycle_csv_has_the_trajectory_schema_and_full_row_count() {
    let out = run_ok(&[
        "cycle", "--r", "1.5", "--count", "4", "--t-end", "0.1", "--dt", "0.05", "--seed", "7",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_rows(&text, "path,t,theta,phi,x,y");
    // 4 paths x 3 samples (t = 0, 0.05, 0.1).
    assert_eq!(rows.len(), 12);
    assert_eq!(meta_value(&text, "seed"), "7");
    assert_eq!(meta_value(&text, "count"), "4");
    assert_eq!(meta_value(&text, "command"), "cycle");
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first.len(), 6);
    assert_eq!(first[0], "0");
    assert_eq!(first[1], "0");
    let theta: f64 = first[2].parse().unwrap();
    assert!((0.0..=std::f64::consts::PI).contains(&theta));
}

#[test]
fn qfunc_csv_embeds_grid_shape_and_state_metadata() {
    let out = run_ok(&[
        "qfunc",
        "--n",
        "1",
        "--r",
        "1.5",
        "--eps",
        "0.5",
        "--n-theta",
        "5",
        "--n-phi",
        "8",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_rows(&text, "theta,phi,value");
    assert_eq!(rows.len(), 40);
    assert_eq!(meta_value(&text, "n_theta"), "5");
    assert_eq!(meta_value(&text, "n_phi"), "8");
    let x: f64 = meta_value(&text, "state_x").parse().unwrap();
    assert!((x - (-0.19955481775501976)).abs() <= 1e-9);
    // Every Q sample is a valid quasiprobability height.
    for row in rows {
        let q: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((0.0..=0.5 / std::f64::consts::PI).contains(&q));
    }
}

#[test]
fn sweep_headers_name_their_axes() {
    let eps = run_ok(&[
        "sweep-eps",
        "--r",
        "1.5",
        "--n-eps",
        "4",
        "--n-phi",
        "4",
        "--workers",
        "1",
    ]);
    let eps_text = String::from_utf8(eps.stdout).unwrap();
    assert_eq!(data_rows(&eps_text, "eps,phi,value").len(), 16);
    assert_eq!(meta_value(&eps_text, "x_name"), "eps");
    assert_eq!(meta_value(&eps_text, "flagged_cells"), "0");

    let delta = run_ok(&[
        "sweep-delta",
        "--eps",
        "0.5",
        "--n-delta",
        "3",
        "--n-phi",
        "4",
        "--workers",
        "1",
    ]);
    let delta_text = String::from_utf8(delta.stdout).unwrap();
    assert_eq!(data_rows(&delta_text, "delta,phi,value").len(), 12);

    let tongue = run_ok(&[
        "tongue",
        "--n",
        "1",
        "--n-eps",
        "3",
        "--n-delta",
        "3",
        "--workers",
        "1",
    ]);
    let tongue_text = String::from_utf8(tongue.stdout).unwrap();
    let rows = data_rows(&tongue_text, "eps,delta,value");
    assert_eq!(rows.len(), 9);
    // The zero-drive column has no synchronization.
    for row in rows.iter().filter(|r| r.starts_with("0,")) {
        assert_eq!(row.split(',').nth(2).unwrap(), "0");
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"n": 1.0, "r": 1.5, "eps": 0.25}"#).unwrap();
    let out = run_ok(&["steady", "--config", cfg.to_str().unwrap(), "--eps", "0.5"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["params"]["n"], 1.0);
    assert_eq!(v["params"]["r"], 1.5);
    assert_eq!(
        v["params"]["eps"], 0.5,
        "flag must override the config file"
    );
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"n": 1.0, "frequency": 2.5}"#).unwrap();
    let (code, stderr) = exit_code(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("frequency"), "stderr: {stderr}");
}

#[test]
fn parameter_errors_name_the_flag_and_exit_one() {
    let (code, stderr) = exit_code(&["steady", "--n", "-1"]);
    assert_eq!(code, 1);
    assert!(
        stderr.contains('n') && stderr.contains("-1"),
        "stderr: {stderr}"
    );

    let (code, _) = exit_code(&["tongue", "--workers", "0"]);
    assert_eq!(code, 1);

    let (code, stderr) = exit_code(&["steady", "--format", "csv"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("JSON"), "stderr: {stderr}");

    let (code, _) = exit_code(&["cycle", "--omega0", "2.0", "--eps", "0.5"]);
    assert_eq!(code, 1, "driven ensembles require the co-rotating frame");
}

#[test]
fn unstable_integration_step_is_a_numerical_error() {
    let (code, stderr) = exit_code(&["cycle", "--r", "1.5", "--dt", "0.2"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("step"), "stderr: {stderr}");
}

#[test]
fn selftest_passes_and_reports_in_both_formats() {
    let out = run_ok(&["selftest"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("ok  ")));
    assert!(!text.contains("\nFAIL"));
    assert!(text.contains("note "), "findings are reported as notes");
    assert!(text.trim_end().ends_with("failed"));

    let out = run_ok(&["selftest", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"]["kind"], "selftest");
    assert_eq!(v["data"]["failed"], 0);
    assert!(v["data"]["passed"].as_u64().unwrap() >= 18);
    assert_eq!(v["data"]["findings"].as_array().unwrap().len(), 1);
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("steady.json");
    let stdout = run_ok(&["steady", "--n", "1", "--r", "1.5"]).stdout;
    let code = sqzsync::cli::run([
        "sqzsync",
        "steady",
        "--n",
        "1",
        "--r",
        "1.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn workers_env_variable_is_honored() {
    let out = bin()
        .env("SQZSYNC_WORKERS", "2")
        .args(["tongue", "--n-eps", "3", "--n-delta", "3"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());

    let out = bin()
        .env("SQZSYNC_WORKERS", "0")
        .args(["tongue", "--n-eps", "3", "--n-delta", "3"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1), "zero workers is a usage error");
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(exit_code(&["--help"]).0, 0);
    assert_eq!(exit_code(&["--version"]).0, 0);
    assert_eq!(exit_code(&["steady", "--help"]).0, 0);
    let (code, _) = exit_code(&["no-such-command"]);
    assert_eq!(code, 1);
}

#[test]
fn missing_output_directory_reports_io_failure() {
    let missing = Path::new("/nonexistent-dir-for-sqzsync/out.json");
    let (code, stderr) = exit_code(&["steady", "--out", missing.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());
}
