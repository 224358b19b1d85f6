use std::process::ExitCode;

use thiserror::Error;

use crate::config::ConfigError;

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Usage = 1,
    VerificationFailed = 2,
    NotConverged = 3,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] hopf_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Core(hopf_core::Error::Io(_) | hopf_core::Error::Json(_) | hopf_core::Error::CacheMismatch(_)) => {
                Status::Usage
            }
            CliError::Core(_) => Status::VerificationFailed,
            _ => Status::Usage,
        }
    }
}
