//! Experiment harness behind the `mlouvain` binary: seeded benchmark sweeps
//! over synthetic multiplex generators, real-dataset runs with optional noise
//! layers, and deterministic CSV reporting.
//!
//! The library half exists so integration tests can drive the same code the
//! binary runs; `main.rs` only parses arguments and maps errors to exit
//! codes.

pub mod cli;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod harness;
pub mod report;
pub mod seeds;

/// Command-level error, split by exit code: usage problems exit 1, anything
/// wrong with data (files, configs, solver preconditions) exits 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<multiplex_louvain::Error> for CliError {
    fn from(e: multiplex_louvain::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
