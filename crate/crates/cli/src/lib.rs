//! Command-line experiment driver.
//!
//! `lohe <subcommand> --config <path> --out <dir> [--seed <u64>] [--threads <n>]`
//!
//! Each run writes one CSV and a `manifest.json` holding the resolved
//! configuration, the library version and the outcome of every check. The
//! exit status is 0 when every check holds, 2 when one fails and 1 on usage,
//! configuration or runtime errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod init;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::config::{parse_config, ScenarioConfig};
use crate::experiments::Experiment;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] lohe_core::LoheError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Experiments {
    /// Integrate one scenario and record D(t), Λ(t) and their bounds
    Simulate,
    /// Mean-field convergence of J_N over a list of particle counts
    Converge,
    /// Terminal dispersion against 3α/(2κ) over a list of couplings
    PracticalSync,
    /// Kuramoto, swarming, splitting and gauge reductions
    ReductionChecks,
    /// Monte-Carlo field fluctuation against 16d/N
    FieldFluctuation,
}

#[derive(Debug, Parser)]
#[command(name = "lohe", version, about = "Lohe matrix model experiments")]
pub struct Args {
    #[command(subcommand)]
    pub experiment: Experiments,
    /// Scenario configuration (JSON)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the seed in the configuration
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

/// Fills in per-experiment defaults so the manifest records what ran.
pub fn resolve(experiment: Experiments, mut cfg: ScenarioConfig) -> ScenarioConfig {
    match experiment {
        Experiments::Converge => {
            if let (None, Some(list)) = (cfg.p_reference, &cfg.n_list) {
                cfg.p_reference = list.last().map(|n| 8 * n);
            }
        }
        Experiments::FieldFluctuation => cfg.samples = Some(cfg.samples()),
        _ => {}
    }
    cfg
}

pub fn run_experiment(experiment: Experiments, cfg: &ScenarioConfig) -> Result<Experiment, CliError> {
    match experiment {
        Experiments::Simulate => experiments::run_simulate(cfg),
        Experiments::Converge => experiments::run_converge(cfg),
        Experiments::PracticalSync => experiments::run_practical_sync(cfg),
        Experiments::ReductionChecks => experiments::run_reduction_checks(cfg),
        Experiments::FieldFluctuation => experiments::run_field_fluctuation(cfg),
    }
}

pub fn write_outputs(dir: &Path, cfg: &ScenarioConfig, exp: &Experiment) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let csv = format!("{}.csv", exp.name);
    exp.report.write_to(&dir.join(&csv))?;
    let manifest = json!({
        "experiment": exp.name,
        "version": lohe_core::VERSION,
        "config": cfg,
        "outputs": [csv],
        "passed": exp.passed(),
        "checks": exp.checks,
        "summary": exp.summary,
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

fn execute(args: &Args) -> Result<Experiment, CliError> {
    let config_path = args
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let out = args
        .out
        .as_ref()
        .ok_or_else(|| CliError::Config("--out is required".into()))?;
    let text = std::fs::read_to_string(config_path)?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let cfg = resolve(args.experiment, cfg);
    let exp = match args.threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?
            .install(|| run_experiment(args.experiment, &cfg))?,
        None => run_experiment(args.experiment, &cfg)?,
    };
    write_outputs(out, &cfg, &exp)?;
    Ok(exp)
}

/// Parses arguments, runs the experiment and returns the exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(&args) {
        Ok(exp) => {
            for c in &exp.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if exp.passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("lohe: {e}");
            EXIT_ERROR
        }
    }
}
