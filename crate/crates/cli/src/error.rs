use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}:{column}: {message}")]
    ConfigSyntax { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{context}: {source}")]
    Csv { context: String, source: csv::Error },
    #[error("{context}: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error(transparent)]
    Core(#[from] noisebench_core::Error),
    #[error("{0}")]
    MissingData(String),
    #[error("self-test failed: {0}")]
    SelftestFailed(String),
}

impl CliError {
    /// Process exit code: 2 for usage and configuration mistakes, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::ConfigSyntax { .. } | CliError::Config { .. } => 2,
            CliError::Core(noisebench_core::Error::Config(_)) => 2,
            _ => 1,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn csv(context: impl Into<String>, source: csv::Error) -> Self {
        CliError::Csv { context: context.into(), source }
    }

    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        CliError::Json { context: context.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
