//! Experiment driver: manifests, sharded and checkpointed enumeration, and
//! JSON/CSV reports.

pub mod checkpoint;
pub mod experiments;
pub mod manifest;
pub mod report;
pub mod runner;

use std::path::Path;

use planecount_core::stats::StatsError;
use thiserror::Error;

pub use experiments::{run, run_with};
pub use manifest::{Execution, Experiment, Kind, Manifest, StrategySpec};
pub use report::Report;
pub use runner::Control;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("interrupted before completion")]
    Interrupted,
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn from_stats(e: StatsError) -> Self {
        match e {
            StatsError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            StatsError::BadShard { .. } | StatsError::EmptySample => CliError::InvalidManifest(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }

    /// 2: invalid manifest, 3: budget exceeded, 4: internal inconsistency, 1: anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidManifest(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Inconsistency(_) => 4,
            _ => 1,
        }
    }
}
