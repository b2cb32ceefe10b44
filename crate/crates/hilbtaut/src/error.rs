use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    /// A checked identity failed; the most serious outcome.
    #[error("property falsified: {0}")]
    Falsified(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Falsified(_) => 3,
        }
    }
}

impl From<hilbtaut_core::Error> for CliError {
    fn from(e: hilbtaut_core::Error) -> Self {
        match e {
            hilbtaut_core::Error::Internal(_) | hilbtaut_core::Error::NotEquivariant(_) => CliError::Falsified(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
