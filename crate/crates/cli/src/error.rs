use std::path::Path;

use hed_core::frontier::FrontierError;
use hed_core::synth::ScenarioError;
use hed_core::{BootstrapError, HedError};
use thiserror::Error;

/// Failures surfaced by the command line, each tied to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Well-formed input that breaks a data invariant (exit 3).
    #[error("{0}")]
    Invariant(String),
    /// Writing artifacts failed (exit 1).
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Output { .. } => 1,
        }
    }

    pub(crate) fn read(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Usage(format!("cannot read {}: {err}", path.display()))
    }

    pub(crate) fn write(path: &Path, source: std::io::Error) -> Self {
        CliError::Output {
            path: path.display().to_string(),
            source,
        }
    }
}

impl From<HedError> for CliError {
    fn from(e: HedError) -> Self {
        match e {
            HedError::NonPositiveDecay(_) | HedError::NonPositiveBudget(_) | HedError::NonPositiveBeta(_) => {
                CliError::Usage(e.to_string())
            }
            HedError::InvalidPartition(_) => CliError::Usage(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<BootstrapError> for CliError {
    fn from(e: BootstrapError) -> Self {
        match e {
            BootstrapError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            BootstrapError::Hed(inner) => inner.into(),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<FrontierError> for CliError {
    fn from(e: FrontierError) -> Self {
        match e {
            FrontierError::ThresholdOutOfRange(_) => CliError::Usage(e.to_string()),
            FrontierError::Hed(inner) => inner.into(),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::InvalidSpec(msg) => CliError::Usage(format!("scenario invariant violated: {msg}")),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}
