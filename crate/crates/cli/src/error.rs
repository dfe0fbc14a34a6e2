use scu::ScuError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config files or inputs; exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Failures while computing or writing results; exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn config(e: ScuError) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn runtime(e: ScuError) -> Self {
        CliError::Runtime(e.to_string())
    }
}
