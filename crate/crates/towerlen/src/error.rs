use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not exact: {0}")]
    Inexact(String),
}

pub type Result<T> = std::result::Result<T, Error>;
