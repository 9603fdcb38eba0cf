//! Tests of the compiled `dtlab` executable: examples, exit codes, flags,
//! configs and manifest replay.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dtlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn oracle_and_moment_examples() {
    let _g = super::serial();
    let out = dtlab(&["oracle", "*1*1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["trace"], "2/3");

    let out = dtlab(&["moment", "*1"]);
    assert_eq!(json(&out)["trace"], "1/2");
    let out = dtlab(&["moment", ""]);
    assert_eq!(json(&out)["moment"], serde_json::json!(["1"]));
    assert_eq!(json(&out)["trace"], "1");
    let out = dtlab(&["moment", "11"]);
    assert_eq!(json(&out)["moment"], serde_json::json!(["0"]));
}

#[test]
fn csv_output_for_words() {
    let _g = super::serial();
    let out = dtlab(&["moment", "**11", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "word,trace\n**11,1/6\n");
}

#[test]
fn parse_and_flag_errors_exit_with_configuration_code() {
    let _g = super::serial();
    let out = dtlab(&["moment", "*2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[cumulant_engine::bad_letter]"));
    assert_eq!(dtlab(&["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(dtlab(&["hs", "--format", "xml"]).status.code(), Some(2));
    let out = dtlab(&["hs", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiments::invalid_config"));
}

#[test]
fn help_lists_every_flag() {
    let _g = super::serial();
    let out = dtlab(&["simulate", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in ["--config", "--seed", "--n", "--trials", "--out", "--format"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn simulate_is_deterministic() {
    let _g = super::serial();
    let a = dtlab(&["simulate", "--n", "4", "--seed", "0"]);
    let b = dtlab(&["simulate", "--n", "4", "--seed", "0"]);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn angle_reports_the_reference_bound() {
    let _g = super::serial();
    let out = dtlab(&["angle", "--n", "64", "--trials", "2"]);
    let v = json(&out);
    let bound = v["two_annulus"]["cos_bound"].as_f64().unwrap();
    assert!((bound - 7.0f64.powf(-0.5)).abs() < 1e-12);
}

#[test]
fn config_file_and_replay_round_trip() {
    let _g = super::serial();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("hs.json");
    std::fs::write(&config, r#"{"n": 12, "trials": 5, "seed": 11}"#).unwrap();
    let out_path = dir.path().join("report.csv");
    let out = dtlab(&[
        "hs",
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "4",
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(report.lines().count(), 1 + 4);

    let manifest_path = dir.path().join("report.csv.manifest.json");
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["command"], "hs");
    assert_eq!(manifest["config"]["trials"], 4);
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["format"], "csv");

    let out = dtlab(&["replay", manifest_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["identical"], true);

    std::fs::write(&out_path, report.replace('0', "1")).unwrap();
    let out = dtlab(&["replay", manifest_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["identical"], false);
}

#[test]
fn unknown_config_fields_are_rejected() {
    let _g = super::serial();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"n": 12, "trials": 5, "seed": 11, "extra": 1}"#).unwrap();
    let out = dtlab(&["hs", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(Path::new(&config).exists());
}

#[test]
fn concentration_reports_criterion_failure_with_exit_one() {
    let _g = super::serial();
    let out = dtlab(&["concentration"]);
    let v = json(&out);
    let pass = v["pass"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if pass { 0 } else { 1 }));
    assert!(v["family"]["checks"]["nondecreasing"].as_bool().unwrap());
}
