use std::process::ExitCode;

use coulombium::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("{0}")]
    Subcritical(String),
    #[error("{0}")]
    ChecksFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::NotConverged(_) | CliError::ChecksFailed(_) => 2,
            CliError::Subcritical(_) => 3,
        })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::MaxIterExceeded { .. } | CoreError::LineSearchStalled { .. } | CoreError::NoConvergence(_) => {
                CliError::NotConverged(e.to_string())
            }
            CoreError::DivergingEnergy { .. } => CliError::Subcritical(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}
