//! Harness error type and process exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] criga_core::Error),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed output document: {0}")]
    Parse(String),
}

impl HarnessError {
    /// Exit code contract: 1 configuration, 2 runtime/convergence, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Toml(_) => 1,
            HarnessError::Core(core) => match core {
                criga_core::Error::Config(_)
                | criga_core::Error::UnsupportedQuery(_)
                | criga_core::Error::Domain(_) => 1,
                criga_core::Error::Convergence { .. }
                | criga_core::Error::ThresholdNotFound(_) => 2,
            },
            HarnessError::Parse(_) => 2,
            HarnessError::Io(_) | HarnessError::Json(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
