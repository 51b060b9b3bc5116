use std::path::Path;
use std::process::{Command, Output};

fn relaxsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relaxsim")).args(args).output().unwrap()
}

fn dir_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_snapshots_entropy_and_steps() {
    let tmp = tempfile::tempdir().unwrap();
    let out = relaxsim(&["run", "--t-final", "0.002", "--output", dir_arg(tmp.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("snapshots.csv")).unwrap();
    assert!(csv.contains("# meta model=euler-friction"));
    assert!(csv.contains("x,comp_0,comp_1"));
    assert_eq!(csv.matches("# t=").count(), 2);
    let entropy = std::fs::read_to_string(tmp.path().join("snapshots_entropy.csv")).unwrap();
    assert!(entropy.starts_with("t,S"));
    assert!(tmp.path().join("snapshots_steps.csv").exists());
}

#[test]
fn zero_final_time_gives_initial_snapshot_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = relaxsim(&["run", "--t-final", "0", "-o", dir_arg(tmp.path())]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("snapshots.csv")).unwrap();
    assert_eq!(csv.matches("# t=").count(), 1);
}

#[test]
fn invalid_epsilon_exits_with_usage_code() {
    let out = relaxsim(&["run", "--epsilon", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
}

#[test]
fn unknown_preset_lists_the_available_ones() {
    let out = relaxsim(&["preset", "no-such-thing"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("euler-friction-paper") && err.contains("coupled-paper"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(relaxsim(&["run", "--bogus"]).status.code(), Some(2));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"model": {"name": "m1"}, "cells": 40, "dx": 0.025, "epsilon": 1e-2, "t_final": 0.001}"#)
        .unwrap();
    let out = relaxsim(&["run", "--config", dir_arg(&cfg), "--cells", "20", "-o", dir_arg(tmp.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("snapshots.csv")).unwrap();
    assert!(csv.contains("# meta model=m1"));
    assert!(csv.contains("# meta cells=20"));

    std::fs::write(&cfg, r#"{"epsilon": 1e-2, "colour": "red"}"#).unwrap();
    let out = relaxsim(&["validate", "--config", dir_arg(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_configuration_gives_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = relaxsim(&["run", "--model", "coupled-euler-m1", "--t-final", "0.001", "--dx", "0.01", "-o", dir_arg(d.path())]);
        assert!(out.status.success());
    }
    for f in ["snapshots.csv", "snapshots_entropy.csv", "snapshots_steps.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn thread_cap_does_not_change_results() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = |d: &Path| vec!["run".to_string(), "--t-final".into(), "0.001".into(), "-o".into(), dir_arg(d).into()];
    let one = Command::new(env!("CARGO_BIN_EXE_relaxsim")).args(args(a.path())).env("RELAXSIM_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_relaxsim")).args(args(b.path())).env("RELAXSIM_THREADS", "4").output().unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(std::fs::read(a.path().join("snapshots.csv")).unwrap(), std::fs::read(b.path().join("snapshots.csv")).unwrap());
    let bad = Command::new(env!("CARGO_BIN_EXE_relaxsim")).args(["run", "--t-final", "0"]).env("RELAXSIM_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn compare_identical_and_reference_files() {
    let tmp = tempfile::tempdir().unwrap();
    let d = dir_arg(tmp.path());
    assert!(relaxsim(&["run", "--t-final", "0.004", "-o", d]).status.success());
    assert!(relaxsim(&["reference", "--t-final", "0.004", "--refine", "2", "-o", d]).status.success());
    let snap = tmp.path().join("snapshots.csv");
    let out = relaxsim(&["compare", dir_arg(&snap), dir_arg(&snap), "--json"]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for r in reports.as_array().unwrap() {
        assert_eq!(r["components"][0]["linf"].as_f64(), Some(0.0));
    }
    let refp = tmp.path().join("reference.csv");
    let out = relaxsim(&["compare", dir_arg(&snap), dir_arg(&refp), "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let last = reports.as_array().unwrap().last().unwrap();
    assert_eq!(last["cells"].as_u64(), Some(100));
    assert!(last["components"][0]["relative_l1"].as_f64().unwrap() < 0.05);
    let text = relaxsim(&["compare", dir_arg(&snap), dir_arg(&refp), "--norm", "linf"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("linf="));
    assert_eq!(relaxsim(&["compare", dir_arg(&snap), dir_arg(&refp), "--norm", "l7"]).status.code(), Some(2));
}

#[test]
fn preset_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let out = relaxsim(&["preset", "coupled-paper", "--t-final", "0.002", "-o", dir_arg(tmp.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["scheme.csv", "reference.csv", "compare.json", "scheme_entropy.csv"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    let list = relaxsim(&["preset", "--list"]);
    assert!(String::from_utf8_lossy(&list.stdout).contains("shallow-water-step"));
}

#[test]
fn validate_reports_structure() {
    for model in ["euler-friction", "m1", "coupled-euler-m1", "shallow-water"] {
        let out = relaxsim(&["validate", "--model", model, "--samples", "200"]);
        assert!(out.status.success(), "{model}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
