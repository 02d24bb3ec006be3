use mfunclab::Error as CoreError;
use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("backend: {0}")]
    Backend(#[source] CoreError),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("spectral sampling failed: {0}")]
    SpectralSampling(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Backend(_) => 3,
            CliError::Hypothesis(_) => 4,
            CliError::SpectralSampling(_) => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::HypothesisViolated(msg) => CliError::Hypothesis(msg),
            other => CliError::Backend(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
