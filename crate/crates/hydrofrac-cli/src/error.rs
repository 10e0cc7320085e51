//! CLI error type carrying the process exit code.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 domain-rule rejection,
//! 3 blowup halt, 4 I/O failure.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("simulation halted: {0}")]
    Blowup(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Blowup(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Wraps an I/O error with the path it concerns.
    pub fn io(path: &Path, err: std::io::Error) -> CliError {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
