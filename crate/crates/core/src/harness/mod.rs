//! Command layer behind the `poisson-integrators` binary.
//!
//! Exit codes: 0 success or check passed, 1 check failed, 2 configuration
//! error, 3 numerical blow-up.

pub mod cli;
pub mod commands;
pub mod config;
pub mod trajectory;

use thiserror::Error;

pub use commands::{
    cmd_eig, cmd_integrate, cmd_order, cmd_verify, integrate, ExitStatus, Integration,
};
pub use config::{Check, Method, Observable, Output, RunConfig, SystemSpec};
pub use trajectory::{TrajectoryRecord, TrajectoryRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            HarnessError::Numerical(_) => ExitStatus::BlowUp,
            _ => ExitStatus::ConfigError,
        }
    }
}
