use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a successful, compliant run.
pub const EXIT_OK: i32 = 0;
/// Configuration, I/O or numerical failure.
pub const EXIT_ERROR: i32 = 1;
/// Exploration measured a non-positive safety index.
pub const EXIT_SAFETY_VIOLATION: i32 = 2;
/// A re-simulated certified point failed a specification.
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] etc_core::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
