use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("guard violation: {0}")]
    Guard(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Verify(_) | CliError::Io(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<qbc_core::Error> for CliError {
    fn from(e: qbc_core::Error) -> Self {
        use qbc_core::Error::*;
        match e {
            DimensionGuard { .. } | EnumerationTooLarge(_) | IllegitimateOperation { .. } => {
                CliError::Guard(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
