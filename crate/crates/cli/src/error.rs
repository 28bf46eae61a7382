use serde::Serialize;
use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] stvflow_core::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    /// The command ran to completion but its property check failed.
    #[error("check failed: {0}")]
    Check(String),
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_solver_failure() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
            CliError::Check(_) => 4,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let kind = match self {
            CliError::Usage(_) => "validation",
            CliError::Core(e) if e.is_solver_failure() => "solver",
            CliError::Core(_) => "validation",
            CliError::Io(_) => "io",
            CliError::Check(_) => "check",
        };
        ErrorRecord {
            kind,
            message: self.to_string(),
            exit_code: self.exit_code(),
        }
    }
}
