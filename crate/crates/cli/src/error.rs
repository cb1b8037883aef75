use std::path::Path;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or input content.
    #[error("{0}")]
    Validation(String),

    /// A sampler failed numerically.
    #[error("{0}")]
    Numerical(String),

    #[error("{0}")]
    Io(String),

    /// A draws file whose payload does not match its recorded checksum.
    #[error("checksum error: {0}")]
    Checksum(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::Checksum(_) => 4,
        }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl From<mtmbsp::Error> for CliError {
    fn from(e: mtmbsp::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}
