use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use regflux::scenario::{Artifact, RunReport};
use sha2::{Digest, Sha256};

const MINIMAL: &str = r#"{
  "name": "minimal",
  "task": {
    "kind": "solve",
    "flux": {"kind": "smooth", "name": "burgers"},
    "data": {"kind": "bump", "center": 0.0, "radius": 0.5, "height": 0.8},
    "grid": {"x_min": -2.0, "x_max": 2.0, "cells": 200},
    "epsilon": 0.05,
    "t_end": 0.5,
    "samples": 8,
    "checks": {"mass_drift": 1e-12}
  }
}"#;

fn regflux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regflux"))
        .args(args)
        .env_remove("REGFLUX_JOBS")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn manifest(dir: &Path) -> Vec<Artifact> {
    #[derive(serde::Deserialize)]
    struct M {
        artifacts: Vec<Artifact>,
    }
    let m: M =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    m.artifacts
}

#[test]
fn minimal_solve_writes_profiles_diagnostics_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "minimal.json", MINIMAL);
    let out = tmp.path().join("out");
    let o = regflux(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let u = fs::read_to_string(out.join("u.csv")).unwrap();
    assert!(u.starts_with("t,x,u\n"));
    assert_eq!(u.lines().count(), 1 + 9 * 200);
    let d = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(d.starts_with("t,mass,dissipation,picard_iters\n"));

    let artifacts = manifest(&out);
    let paths: Vec<&str> = artifacts.iter().map(|a| a.path.as_str()).collect();
    assert_eq!(
        paths,
        ["config.json", "diagnostics.csv", "report.json", "u.csv"]
    );
    for a in &artifacts {
        let data = fs::read(out.join(&a.path)).unwrap();
        assert_eq!(a.bytes, data.len() as u64);
        assert_eq!(a.sha256, hex::encode(Sha256::digest(&data)));
    }
    let report: RunReport =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report.passed);
    assert_eq!(report.kind, "solve");
}

#[test]
fn csv_numbers_round_trip_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "minimal.json", MINIMAL);
    let out = tmp.path().join("out");
    assert_eq!(
        regflux(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    for line in fs::read_to_string(out.join("u.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .take(500)
    {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v}"), field);
        }
    }
}

#[test]
fn misspelled_key_is_a_parse_error_naming_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "typo.json",
        &MINIMAL.replace("\"epsilon\"", "\"epsilonn\""),
    );
    let o = regflux(&[
        "solve",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("parse error") && err.contains("epsilonn"),
        "{err}"
    );
}

#[test]
fn invalid_tolerance_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.json", &MINIMAL.replace("1e-12", "-1"));
    let o = regflux(&[
        "solve",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid scenario"));
}

#[test]
fn subcommand_must_match_the_task_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "minimal.json", MINIMAL);
    let o = regflux(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("solve task"));
}

#[test]
fn failed_check_shows_in_report_and_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let text = MINIMAL
        .replace("\"name\": \"burgers\"", "\"name\": \"zero\"")
        .replace(
            "{\"kind\": \"bump\", \"center\": 0.0, \"radius\": 0.5, \"height\": 0.8}",
            "{\"kind\": \"gaussian\", \"time\": 1.0, \"center\": 0.0, \"mass\": 1.0}",
        )
        .replace("\"mass_drift\": 1e-12", "\"reference_sup\": 1e-30");
    let cfg = write_config(tmp.path(), "strict.json", &text);
    let out = tmp.path().join("out");
    let o = regflux(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let report: RunReport =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(!report.passed);
    assert!(report
        .checks
        .iter()
        .any(|c| c.name == "reference_sup_fv" && !c.passed));
}

#[test]
fn same_config_twice_gives_identical_hashes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "minimal.json", MINIMAL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(
        regflux(&["solve", "--config", &cfg, "--out", a.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let o = Command::new(env!("CARGO_BIN_EXE_regflux"))
        .args(["solve", "--config", &cfg, "--out", b.to_str().unwrap()])
        .env("REGFLUX_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(manifest(&a), manifest(&b));
    assert_eq!(
        fs::read(a.join("manifest.json")).unwrap(),
        fs::read(b.join("manifest.json")).unwrap()
    );
}

#[test]
fn checks_scenario_is_reproducible_from_its_seed() {
    let text = r#"{
      "name": "pairs", "seed": 11,
      "task": {"kind": "checks",
        "flux": {"kind": "smooth", "name": "burgers"},
        "data": {"kind": "bump", "center": 0.0, "radius": 0.5, "height": 0.5},
        "grid": {"x_min": -2.0, "x_max": 2.0, "cells": 160},
        "epsilon": 0.05, "t_end": 0.5, "samples": 8,
        "ordered_pairs": 4, "jensen_draws": 200}
    }"#;
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "pairs.json", text);
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|d| {
            let out = tmp.path().join(d);
            let o = regflux(&[
                "check",
                "--config",
                &cfg,
                "--out",
                out.to_str().unwrap(),
                "--jobs",
                "2",
            ]);
            assert_eq!(
                o.status.code(),
                Some(0),
                "{}",
                String::from_utf8_lossy(&o.stderr)
            );
            manifest(&out)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert!(runs[0].iter().any(|a| a.path == "checks/ordered_pairs.csv"));
}

#[test]
fn missing_config_file_is_an_execution_error() {
    let o = regflux(&["solve", "--config", "/nonexistent/regflux.json"]);
    assert_eq!(o.status.code(), Some(1));
}
