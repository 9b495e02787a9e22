use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported star power: {0}")]
    UnsupportedPower(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sample skipped: {0}")]
    SkippedSample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
