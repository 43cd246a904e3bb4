//! Running a configuration and writing its report files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use super::config::{ConfigError, SceneConfig};
use super::presets::Preset;
use crate::analytic::scene_energy;
use crate::forces::{energy_and_force, force_along_gap, run_sweep, Backend, Method, SweepTable};
use crate::integrator::{monte_carlo_oracle, pair_energy};
use crate::Error;

/// The outcome of one run, before anything is written.
#[derive(Debug, Clone)]
pub struct Report {
    /// Full machine-readable report, without the timestamp.
    pub json: Value,
    pub table: Option<SweepTable>,
    /// Human-readable summary.
    pub text: String,
    /// Hard failures; any entry makes the run fail.
    pub failures: Vec<String>,
}

/// Files written by [`write_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Written {
    pub report: PathBuf,
    pub table: Option<PathBuf>,
}

fn twelve_digits(x: f64) -> String {
    format!("{x:.11e}")
}

fn error_value(e: &Error) -> Value {
    json!({ "error": e.to_string() })
}

fn soft(backend: Backend, e: &Error) -> bool {
    backend == Backend::Both && matches!(e, Error::NoAnalyticForm(_))
}

/// Evaluates every backend the configuration asks for.
pub fn run_report(config: &SceneConfig, preset: Option<Preset>) -> Result<Report, ConfigError> {
    config.validate()?;
    let scene = config.scene()?;
    let mut failures = Vec::new();
    let mut text = String::new();
    let coupling = scene.coupling();
    let units = scene.units;
    let _ = writeln!(
        text,
        "scene: {} / {}, n = {}, gap = {}",
        scene.body1.kind(),
        scene.body2.kind(),
        scene.kernel_exponent,
        scene.gap().unwrap_or(f64::NAN)
    );
    let _ = writeln!(
        text,
        "coupling: B12 = {}, A12 = {}",
        twelve_digits(coupling.b12),
        twelve_digits(coupling.a12)
    );
    let _ = writeln!(
        text,
        "units: energy in {}, force in {}",
        units.energy_unit(),
        units.force_unit()
    );

    let mut results = serde_json::Map::new();
    let mut analytic_energy = None;
    let mut numeric_energy = None;

    if config.backend != Backend::Integrator {
        let value = match scene_energy(&scene) {
            Ok(a) => {
                analytic_energy = Some(a.energy);
                let force = force_along_gap(&scene, None, &Method::Analytic);
                let _ = writeln!(text, "analytic:   U = {:e}  [{}]", a.energy, a.formula);
                let mut v = json!({ "energy": a.energy, "formula": a.formula, "exact": a.exact });
                match force {
                    Ok(f) => {
                        let _ = writeln!(text, "            F = {f:e}");
                        v["force"] = json!(f);
                    }
                    Err(e) => {
                        failures.push(format!("analytic force: {e}"));
                        v["force_error"] = json!(e.to_string());
                    }
                }
                v
            }
            Err(e) => {
                let _ = writeln!(text, "analytic:   {e}");
                if !soft(config.backend, &e) {
                    failures.push(format!("analytic: {e}"));
                }
                error_value(&e)
            }
        };
        results.insert("analytic".into(), value);
    }

    if config.backend != Backend::Analytic {
        let method = Method::Integrator(config.integrator);
        let (energy, force) = match energy_and_force(&scene, None, &method) {
            Ok((est, f)) => (Ok(est), Ok(f)),
            Err(e) => (pair_energy(&scene, &config.integrator), Err(e)),
        };
        let value = match energy {
            Ok(est) => {
                numeric_energy = Some(est.value);
                let _ = writeln!(
                    text,
                    "integrator: U = {:e}  (rel. error estimate {:.2e}, {} kernel evaluations, depth {}{})",
                    est.value,
                    est.rel_error_estimate,
                    est.kernel_evaluations,
                    est.tree_depth_used,
                    if est.converged { "" } else { ", above target" }
                );
                let mut v = serde_json::to_value(est).expect("estimates serialise");
                match force {
                    Ok(f) => {
                        let _ = writeln!(text, "            F = {f:e}");
                        v["force"] = json!(f);
                    }
                    Err(e) => {
                        failures.push(format!("integrator force: {e}"));
                        v["force_error"] = json!(e.to_string());
                    }
                }
                v
            }
            Err(e) => {
                let _ = writeln!(text, "integrator: {e}");
                failures.push(format!("integrator: {e}"));
                error_value(&e)
            }
        };
        results.insert("integrator".into(), value);
    }

    if let (Some(a), Some(n)) = (analytic_energy, numeric_energy) {
        let _ = writeln!(text, "ratio analytic/integrator = {:.6}", a / n);
        results.insert("ratio".into(), json!(a / n));
    }

    if let Some(mc) = config.monte_carlo {
        let value = match monte_carlo_oracle(&scene, mc.samples, mc.seed) {
            Ok(est) => {
                let _ = writeln!(
                    text,
                    "monte carlo: U = {:e}  (rel. std. error {:.2e}, {} samples, seed {})",
                    est.value, est.rel_error_estimate, mc.samples, mc.seed
                );
                let mut v = serde_json::to_value(est).expect("estimates serialise");
                v["seed"] = json!(mc.seed);
                v
            }
            Err(e) => {
                let _ = writeln!(text, "monte carlo: {e}");
                failures.push(format!("monte carlo: {e}"));
                error_value(&e)
            }
        };
        results.insert("monte_carlo".into(), value);
    }

    let table = match &config.sweep {
        Some(spec) => {
            let table = run_sweep(spec, &scene, &config.integrator).map_err(|source| {
                ConfigError::Precondition {
                    field: "sweep",
                    source,
                }
            })?;
            let _ = writeln!(
                text,
                "sweep over {} ({} rows):",
                spec.parameter.name(),
                table.rows.len()
            );
            for row in &table.rows {
                match &row.error {
                    None => {
                        let _ = writeln!(
                            text,
                            "  {:>12e}  {:<10}  U = {:+.9e}  F = {:+.9e}",
                            row.parameter,
                            row.backend.name(),
                            row.energy,
                            row.force
                        );
                    }
                    Some(e) => {
                        let _ = writeln!(
                            text,
                            "  {:>12e}  {:<10}  {e}",
                            row.parameter,
                            row.backend.name()
                        );
                        let no_form = e.starts_with("no analytic form");
                        if !(spec.backend == Backend::Both
                            && row.backend == Backend::Analytic
                            && no_form)
                        {
                            failures.push(format!("sweep row {}: {e}", row.parameter));
                        }
                    }
                }
            }
            Some(table)
        }
        None => None,
    };

    let comparison = preset.map(|p| p.comparison());
    if let Some(c) = &comparison {
        let _ = writeln!(text, "comparison: {c}");
    }

    let mut json = json!({
        "program": "dispersia",
        "version": env!("CARGO_PKG_VERSION"),
        "preset": preset.map(|p| p.name()),
        "config": config,
        "settings": config.integrator,
        "kernel_exponent": scene.kernel_exponent,
        "units": {
            "system": units,
            "energy_unit": units.energy_unit(),
            "force_unit": units.force_unit(),
            "energy_scale": units.energy_scale(),
        },
        "coupling": {
            "b12": coupling.b12,
            "a12": coupling.a12,
            "b12_printed": twelve_digits(coupling.b12),
            "a12_printed": twelve_digits(coupling.a12),
        },
        "results": Value::Object(results),
        "failures": failures,
    });
    if let Some(t) = &table {
        json["sweep"] = serde_json::to_value(t).expect("tables serialise");
    }
    if let Some(c) = comparison {
        json["comparison"] = c;
    }
    Ok(Report {
        json,
        table,
        text,
        failures,
    })
}

/// The report as written, with its `generated_unix_s` timestamp.
pub fn render_json(report: &Report, timestamp: u64) -> String {
    let mut v = report.json.clone();
    v["generated_unix_s"] = json!(timestamp);
    let mut s = serde_json::to_string_pretty(&v).expect("reports serialise");
    s.push('\n');
    s
}

/// Writes the JSON report and, when there is a sweep, the CSV table into `directory`.
pub fn write_report(
    report: &Report,
    config: &SceneConfig,
    directory: &Path,
) -> std::io::Result<Written> {
    fs::create_dir_all(directory)?;
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let report_path = directory.join(&config.output.report);
    fs::write(&report_path, render_json(report, now))?;
    let table_path = match &report.table {
        Some(t) => {
            let path = directory.join(&config.output.table);
            t.write_csv(fs::File::create(&path)?)?;
            Some(path)
        }
        None => None,
    };
    Ok(Written {
        report: report_path,
        table: table_path,
    })
}
