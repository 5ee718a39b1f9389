//! Batch runner for GMNSE experiments: TOML configuration in, CSV series,
//! JSON reports, field checkpoints and a run manifest out.

pub mod config;
mod experiments;
pub mod output;

use std::path::PathBuf;

use gmnse::attractor::AttractorError;
use gmnse::dynamics::DynamicsError;
use gmnse::estimates::EstimateError;
use thiserror::Error;

pub use config::{load_config, parse_config, Experiment, ExperimentConfig};
pub use experiments::run;
pub use output::{RunManifest, MANIFEST_NAME};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book {}

/// Error categories; each maps to a distinct process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical blow-up: {0}")]
    BlowUp(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Other(_) => 1,
            Self::Config(_) => 2,
            Self::Io { .. } => 3,
            Self::BlowUp(_) => 4,
            Self::Precondition(_) => 5,
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::BlowUp { .. } => Self::BlowUp(e.to_string()),
            DynamicsError::InvalidParams(_) | DynamicsError::InvalidTime(_) => Self::Config(e.to_string()),
            DynamicsError::DomainMismatch => Self::Other(e.to_string()),
        }
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::Dynamics(d) => d.into(),
            EstimateError::InsufficientSamples { .. }
            | EstimateError::BurnInNotCertified { .. }
            | EstimateError::IdenticalInitialData => Self::Precondition(e.to_string()),
            EstimateError::MismatchedSeries(_) | EstimateError::DomainMismatch => Self::Other(e.to_string()),
        }
    }
}

impl From<AttractorError> for CliError {
    fn from(e: AttractorError) -> Self {
        match e {
            AttractorError::Member {
                source: DynamicsError::BlowUp { .. },
                ..
            } => Self::BlowUp(e.to_string()),
            AttractorError::NotAbsorbed { .. } | AttractorError::InsufficientSamples { .. } => {
                Self::Precondition(e.to_string())
            }
            AttractorError::InvalidArgument(_) => Self::Config(e.to_string()),
            AttractorError::Io(source) => Self::Io {
                path: PathBuf::new(),
                source,
            },
            _ => Self::Other(e.to_string()),
        }
    }
}
