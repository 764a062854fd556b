use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("resource cap exceeded: {what} has size {size}, cap is {cap}")]
    Resource { what: String, size: u128, cap: u128 },

    #[error("hypothesis {condition} failed: {detail}")]
    Hypothesis { condition: String, detail: String },

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
