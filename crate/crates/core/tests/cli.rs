use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use dispersia::cli::{parse_config, resolve_config, Args, ConfigError, Preset};
use serde_json::Value;

fn dispersia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dispersia"))
        .args(args)
        .env_remove("DISPERSIA_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

const BOX_PAIR: &str = r#"{
  "body1": {"type": "box", "center": [0, 0, 0], "size": [1, 1, 1]},
  "body2": {"type": "box", "center": [0, 0, 2], "size": [1, 1, 1]},
  "backend": "integrator"
}"#;

fn read_report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn config_round_trips() {
    for p in [
        Preset::CasimirPlates,
        Preset::SpherePlate,
        Preset::MoleculePair,
    ] {
        let c = p.config();
        assert_eq!(parse_config(c.to_json().as_bytes()).unwrap(), c);
    }
    let c = parse_config(BOX_PAIR.as_bytes()).unwrap();
    assert_eq!(parse_config(c.to_json().as_bytes()).unwrap(), c);
}

#[test]
fn defaults_are_filled_in() {
    let c = parse_config(BOX_PAIR.as_bytes()).unwrap();
    assert_eq!(c.integrator.theta, 0.5);
    assert_eq!(c.integrator.max_depth, 10);
    assert_eq!(c.kernel_exponent, 7);
    assert!(c.sweep.is_none());
}

#[test]
fn unknown_field_is_located() {
    let text = BOX_PAIR.replace("\"backend\"", "\"bakend\"");
    match parse_config(text.as_bytes()) {
        Err(e @ ConfigError::UnknownField { at, .. }) => {
            assert_eq!(at.line, 4);
            assert_eq!(e.code(), "unknown_field");
        }
        other => panic!("expected an unknown field error, got {other:?}"),
    }
    let nested = BOX_PAIR.replace(
        "\"size\": [1, 1, 1]}",
        "\"size\": [1, 1, 1], \"radius\": 2}",
    );
    assert!(matches!(
        parse_config(nested.as_bytes()),
        Err(ConfigError::UnknownField { .. })
    ));
}

#[test]
fn syntax_and_type_errors() {
    assert!(matches!(
        parse_config(b"{\"body1\": "),
        Err(ConfigError::Syntax { .. })
    ));
    let text = BOX_PAIR.replace("[1, 1, 1]}", "\"big\"}");
    assert!(matches!(
        parse_config(text.as_bytes()),
        Err(ConfigError::Invalid { .. })
    ));
}

#[test]
fn zero_gap_is_a_precondition_error() {
    let text = BOX_PAIR.replace("[0, 0, 2]", "[0, 0, 1]");
    match parse_config(text.as_bytes()) {
        Err(e @ ConfigError::Precondition { .. }) => assert_eq!(e.code(), "precondition"),
        other => panic!("expected a precondition error, got {other:?}"),
    }
}

#[test]
fn materials_by_name_or_parameters() {
    let text = BOX_PAIR.replace(
        "\"backend\"",
        "\"material1\": \"vacuum\", \"material2\": {\"epsilon0\": \"inf\", \"mu0\": 0}, \"backend\"",
    );
    let c = parse_config(text.as_bytes()).unwrap();
    let scene = c.scene().unwrap();
    assert_eq!(scene.coupling().b12, 0.0);
    let gas = BOX_PAIR.replace(
        "\"backend\"",
        "\"material1\": {\"model\": \"dilute_gas\", \"density\": 1, \"polarizability\": 2}, \"backend\"",
    );
    let scene = parse_config(gas.as_bytes()).unwrap().scene().unwrap();
    assert_eq!(scene.material1.beta0(), 2.0);
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "scene.json", BOX_PAIR);
    let args = Args::try_parse_from([
        "dispersia",
        "--config",
        &path,
        "--theta",
        "0.3",
        "--analytic-only",
    ])
    .unwrap();
    let c = resolve_config(&args).unwrap();
    assert_eq!(c.integrator.theta, 0.3);
    assert_eq!(c.backend, dispersia::forces::Backend::Analytic);
    let bad = Args::try_parse_from(["dispersia", "--config", &path, "--theta", "3"]).unwrap();
    assert!(matches!(
        resolve_config(&bad),
        Err(ConfigError::Precondition { .. })
    ));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let ok = write(dir.path(), "ok.json", BOX_PAIR);
    assert_eq!(
        dispersia(&["--config", &ok, "--out", &out]).status.code(),
        Some(0)
    );

    let unknown = write(
        dir.path(),
        "unknown.json",
        &BOX_PAIR.replace("\"backend\"", "\"colour\""),
    );
    let o = dispersia(&["--config", &unknown, "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown_field"));

    assert_eq!(
        dispersia(&["--config", "/nonexistent/scene.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(dispersia(&["--preset", "nope"]).status.code(), Some(2));
    assert_eq!(dispersia(&[]).status.code(), Some(2));
    assert_eq!(
        dispersia(&[
            "--preset",
            "molecule-pair",
            "--analytic-only",
            "--numeric-only"
        ])
        .status
        .code(),
        Some(2)
    );

    let spheres = write(
        dir.path(),
        "spheres.json",
        r#"{"body1": {"type": "sphere", "center": [0, 0, 0], "radius": 1},
            "body2": {"type": "sphere", "center": [0, 0, 3], "radius": 1}}"#,
    );
    let o = dispersia(&["--config", &spheres, "--analytic-only", "--out", &out]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no analytic form"));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = dispersia(&["--preset", "casimir-plates", "--out", &out]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        let mut report = read_report(dir.path());
        assert!(report["generated_unix_s"].is_u64());
        report["generated_unix_s"] = Value::Null;
        let csv = fs::read(dir.path().join("sweep.csv")).unwrap();
        runs.push((serde_json::to_string_pretty(&report).unwrap(), csv));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn casimir_preset_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = dispersia(&["--preset", "casimir-plates", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_report(dir.path());
    assert_eq!(r["comparison"]["pairwise_printed"], "-0.01365");
    assert_eq!(r["comparison"]["casimir_printed"], "-0.01370");
    assert_eq!(r["settings"]["theta"], 0.5);
    let ratio = r["results"]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-3, "{ratio}");
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("gap,energy,force,rel_error,backend,kernel_exponent,error")
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn molecule_preset_compares_backends() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = dispersia(&["--preset", "molecule-pair", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_report(dir.path());
    let ratio = r["results"]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-12);
    let rows = r["sweep"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("gap,energy,force,rel_error,backend,kernel_exponent,ratio,error\n"));
}

#[test]
fn thread_variable_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let bad = Command::new(env!("CARGO_BIN_EXE_dispersia"))
        .args(["--preset", "molecule-pair", "--out", &out])
        .env("DISPERSIA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let two = Command::new(env!("CARGO_BIN_EXE_dispersia"))
        .args(["--preset", "molecule-pair", "--out", &out])
        .env("DISPERSIA_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(two.status.code(), Some(0));
}
