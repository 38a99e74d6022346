//! Command implementations behind the `secrecy-ascent` binary.

pub mod gradcheck;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use secrecy_ascent::config::SystemConfig;
use secrecy_ascent::experiment::run_experiment;

pub use output::{RunManifest, RunReport};

/// Exit status for a config that fails to parse or validate.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for a failure while running.
pub const EXIT_RUNTIME: i32 = 1;

/// A failure carrying the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            error: error.into(),
        }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        CliError {
            code: EXIT_RUNTIME,
            error: error.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

/// Reads and validates a config file with `(key, value)` overrides applied.
pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<SystemConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::config)?;
    SystemConfig::parse_with_overrides(&text, overrides)
        .with_context(|| format!("invalid config {}", path.display()))
        .map_err(CliError::config)
}

/// Runs the configured experiment on `threads` workers (rayon default when
/// `None`) and writes all outputs into `out_dir`.
pub fn cmd_run(
    cfg: &SystemConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<Vec<PathBuf>, CliError> {
    let started = Instant::now();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(CliError::runtime)?;
    let output = pool
        .install(|| run_experiment(cfg))
        .context("experiment failed")
        .map_err(CliError::runtime)?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(CliError::runtime)?;
    output::write_all(cfg, &output, out_dir, started.elapsed()).map_err(CliError::runtime)
}

/// Parses a `key=value` override.
pub fn parse_assignment(raw: &str) -> Result<(String, String), String> {
    raw.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got `{raw}`"))
}
