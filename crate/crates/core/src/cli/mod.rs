//! Command-line front end: `bitrade <mode> --config <path> [--out <dir>] [--seed N]`.
//!
//! Every run writes `summary.json` to the output directory, plus the CSV
//! files of its mode. The summary holds the crate version, the resolved
//! configuration, the CSV column sets and the mode's result.
//!
//! Exit codes: 0 success, 1 runtime error, 2 configuration error,
//! 3 orientation violated, 4 outcome could not be classified.
//! `BITRADE_THREADS` caps the worker threads of parallel modes.

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;

use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::json;

pub use config::{Mode, RunConfig};

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Model(Error::InvalidParams(_)) => 2,
            CliError::Model(Error::OrientationViolated { .. }) => 3,
            _ => 1,
        }
    }
}

pub const EXIT_UNRESOLVED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bitrade", version, about = "Two-region trade model: equilibria, zones and price dynamics")]
pub struct Args {
    /// What to compute.
    #[arg(value_enum)]
    pub mode: Mode,
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Seed for the stochastic and sweep modes; overrides the file.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Worker count from `BITRADE_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("BITRADE_THREADS").ok()?.trim().parse().ok().filter(|n: &usize| *n > 0)
}

/// Load, run and write everything. Returns the summary on success.
pub fn execute(mode: Mode, config: &Path, out: &Path, seed: Option<u64>) -> Result<(serde_json::Value, bool), CliError> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(s) = seed {
        cfg.override_seed(s);
    }
    cfg.validate(mode)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    let outcome = pool.install(|| run::run(mode, &cfg, out))?;

    let summary = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "mode": mode.name(),
        "config": cfg,
        "csv_schema": output::schema_json(),
        "files": outcome.files,
        "unresolved": outcome.unresolved,
        "result": outcome.result,
    });
    output::write_json(&out.join("summary.json"), &summary)?;
    Ok((summary, outcome.unresolved))
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    match execute(args.mode, &args.config, &args.out, args.seed) {
        Ok((_, false)) => 0,
        Ok((_, true)) => {
            eprintln!("bitrade: the outcome could not be classified within the step budget");
            EXIT_UNRESOLVED
        }
        Err(e) => {
            eprintln!("bitrade: {e}");
            e.exit_code()
        }
    }
}
