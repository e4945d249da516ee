//! Command-line front end: family files in, reports out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod selftest;

use std::fs;
use std::io::Write;

pub use config::{Cli, Command, Format, RunConfig};
pub use error::CliError;

/// Exit code when selftest criteria fail.
pub const EXIT_CRITERIA_FAILED: i32 = 1;

/// Runs a validated configuration inside a pool of `config.threads` workers
/// and writes the output. Returns the process exit code.
pub fn run(config: &RunConfig) -> Result<i32, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let (bytes, code) = pool.install(|| -> Result<(Vec<u8>, i32), CliError> {
        Ok(match &config.command {
            Command::Analyze => (commands::analyze(config)?, 0),
            Command::BoundsTable { n_max, log_dk } => {
                (commands::bounds(config, *n_max, *log_dk)?, 0)
            }
            Command::QuadraticSweep { d_from, d_to } => {
                (commands::quadratic_sweep(config, *d_from, *d_to)?, 0)
            }
            Command::Residue { tolerance } => (commands::residue(config, *tolerance)?, 0),
            Command::Selftest { scale } => {
                let outcomes = selftest::run_all(*scale, config);
                let code = if outcomes.iter().all(|o| o.pass) {
                    0
                } else {
                    EXIT_CRITERIA_FAILED
                };
                (selftest::render(&outcomes), code)
            }
        })
    })?;
    emit(config, &bytes)?;
    Ok(code)
}

fn emit(config: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &config.out_path {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(CliError::io),
    }
}
