use stiefel_core::experiments::ExperimentError;
use stiefel_core::frenet::FrenetError;
use stiefel_core::stiefel::StiefelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("ambiguous logarithm: {count} minimal solutions")]
    Ambiguous { count: usize },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verdict failed: {0}")]
    Verdict(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Verdict(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Ambiguous { .. } => 4,
            CliError::NoConvergence(_) => 5,
        }
    }
}

impl From<StiefelError> for CliError {
    fn from(e: StiefelError) -> Self {
        match e {
            StiefelError::Ambiguous { solutions } => CliError::Ambiguous { count: solutions.len() },
            StiefelError::NoConvergence { .. } => CliError::NoConvergence(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<FrenetError> for CliError {
    fn from(e: FrenetError) -> Self {
        match e {
            FrenetError::Stiefel(inner) => inner.into(),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Stiefel(inner) => inner.into(),
            ExperimentError::Frenet(inner) => inner.into(),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}
