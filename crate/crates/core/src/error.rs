use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid type: {0}")]
    InvalidType(String),
    #[error("invalid adapted sequence: {0}")]
    InvalidSequence(String),
    #[error("index out of domain: {0}")]
    Domain(String),
    #[error("form is not of the shape x_base - sum c*beta: {0}")]
    NotInSpan(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("window: {0}")]
    Window(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
