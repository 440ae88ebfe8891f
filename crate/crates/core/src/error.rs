//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An exhaustive computation would exceed its enumeration budget.
    /// Never silently truncated; callers must fall back to certified bounds.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Malformed or inconsistent input data (file formats, families, tables).
    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
