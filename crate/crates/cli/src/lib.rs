//! Experiment orchestration behind the `swarmsec` binary.

pub mod commands;
pub mod config;

use thiserror::Error;

pub use commands::{
    format_sig, run_eval, run_optimize, run_sweep, run_validate, write_eval, write_surface, write_sweep,
    write_validation, EvalRow, SweepRow, ValidationReport, ValidationRow, Z_LIMIT,
};
pub use config::{load_config, parse_config, ExperimentConfig, SweepAxis, SCHEMA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output error: {0}")]
    Output(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Output(e.to_string())
    }
}

impl CliError {
    /// 2 for configuration and output problems, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Output(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}
