//! The `dispersia` command line: scene files, presets and reports.

mod config;
mod presets;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgGroup, Parser};

pub use self::config::{
    parse_config, BodyConfig, ConfigError, Location, MaterialConfig, MonteCarloConfig,
    OutputConfig, SceneConfig,
};
pub use self::presets::{Preset, PRINTED_DIGITS};
pub use self::report::{render_json, run_report, write_report, Report, Written};
use crate::forces::Backend;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DISPERSIA_THREADS";

/// Retarded dispersion energies and forces between two bodies.
#[derive(Debug, Clone, Parser)]
#[command(name = "dispersia", version, about)]
#[command(group(ArgGroup::new("input").required(true).args(["config", "preset"])))]
pub struct Args {
    /// JSON scene file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Built-in benchmark scene.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Use closed forms only.
    #[arg(long, conflicts_with = "numeric_only")]
    pub analytic_only: bool,
    /// Use the numerical integrator only.
    #[arg(long)]
    pub numeric_only: bool,
    /// Output directory for the report files.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Admissibility parameter.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Maximum octree depth.
    #[arg(long)]
    pub max_depth: Option<u32>,
    /// Relative error target of the integrator.
    #[arg(long)]
    pub target_rel_error: Option<f64>,
    /// Run the Monte Carlo oracle with this many samples.
    #[arg(long)]
    pub mc_samples: Option<u64>,
    /// Seed of the Monte Carlo oracle.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Loads the configuration named by `args` and applies the flag overrides.
pub fn resolve_config(args: &Args) -> Result<SceneConfig, ConfigError> {
    let mut config = match (&args.config, args.preset) {
        (Some(path), _) => {
            let text = std::fs::read(path).map_err(|e| ConfigError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            parse_config(&text)?
        }
        (None, Some(p)) => p.config(),
        (None, None) => unreachable!("clap requires one input"),
    };
    if args.analytic_only {
        config.backend = Backend::Analytic;
    }
    if args.numeric_only {
        config.backend = Backend::Integrator;
    }
    if let Some(sweep) = &mut config.sweep {
        if args.analytic_only {
            sweep.backend = Backend::Analytic;
        }
        if args.numeric_only {
            sweep.backend = Backend::Integrator;
        }
    }
    let s = &mut config.integrator;
    if let Some(t) = args.theta {
        s.theta = t;
    }
    if let Some(d) = args.max_depth {
        s.max_depth = d;
    }
    if let Some(e) = args.target_rel_error {
        s.target_rel_error = e;
    }
    match (args.mc_samples, &mut config.monte_carlo) {
        (Some(samples), Some(mc)) => mc.samples = samples,
        (Some(samples), None) => config.monte_carlo = Some(MonteCarloConfig { samples, seed: 0 }),
        _ => {}
    }
    if let (Some(seed), Some(mc)) = (args.seed, &mut config.monte_carlo) {
        mc.seed = seed;
    }
    if let Some(dir) = &args.out {
        config.output.directory = dir.clone();
    }
    config.validate()?;
    Ok(config)
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            )),
        },
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(args: &Args) -> i32 {
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let config = match resolve_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            return EXIT_CONFIG;
        }
    };
    let job = || run_config(&config, args.preset);
    match threads {
        None => job(),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(job),
            Err(e) => {
                eprintln!("error: cannot start {k} workers: {e}");
                EXIT_NUMERIC
            }
        },
    }
}

fn run_config(config: &SceneConfig, preset: Option<Preset>) -> i32 {
    let report = match run_report(config, preset) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            return EXIT_CONFIG;
        }
    };
    print!("{}", report.text);
    match write_report(&report, config, &config.output.directory) {
        Ok(w) => {
            println!("wrote {}", w.report.display());
            if let Some(t) = w.table {
                println!("wrote {}", t.display());
            }
        }
        Err(e) => {
            eprintln!(
                "error: cannot write report to {}: {e}",
                config.output.directory.display()
            );
            return EXIT_CONFIG;
        }
    }
    if report.failures.is_empty() {
        EXIT_OK
    } else {
        for f in &report.failures {
            eprintln!("failed: {f}");
        }
        EXIT_NUMERIC
    }
}

/// Parses `argv` and runs it; clap's own errors exit with the config code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Args::try_parse_from(argv) {
        Ok(args) => run(&args),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
