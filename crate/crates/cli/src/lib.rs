//! Experiment driver for the discrete wave-equation inverse-problem suite:
//! strict JSON configuration, five command pipelines, deterministic seeding,
//! and RFC 4180 CSV persistence.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod runner;

use std::path::PathBuf;

/// Exit-code contract: 0 all gates passed, 1 a mathematical gate failed,
/// 2 configuration error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    GateFailed,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Core(waveinv_core::Error),
}

impl From<waveinv_core::Error> for CliError {
    fn from(e: waveinv_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Common run context resolved from the CLI arguments and the config file.
pub struct RunContext {
    pub config: config::RunConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub jobs: usize,
}

impl RunContext {
    pub fn prepare(&self) -> CliResult<()> {
        std::fs::create_dir_all(&self.out_dir)?;
        Ok(())
    }
}
