use std::process::ExitCode;

use ovalflow_core::Error as CoreError;
use thiserror::Error;

/// Failure classes with their process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed inputs, rejected curves: exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical routine failed: exit code 3.
    #[error("numerical failure in {operation}: {source}")]
    Numerical {
        operation: String,
        #[source]
        source: CoreError,
    },
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Numerical { .. } => ExitCode::from(3),
            CliError::Output(_) => ExitCode::from(1),
        }
    }

    pub fn numerical(operation: impl Into<String>) -> impl FnOnce(CoreError) -> CliError {
        let operation = operation.into();
        move |source| CliError::Numerical { operation, source }
    }

    /// Input-side failures: construction and parse errors are the caller's fault.
    pub fn input(e: CoreError) -> CliError {
        CliError::Config(e.to_string())
    }

    pub fn output(e: CoreError) -> CliError {
        CliError::Output(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
