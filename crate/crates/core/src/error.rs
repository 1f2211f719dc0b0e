use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZenoError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("insufficient signal: {0}")]
    InsufficientSignal(String),
}

pub type Result<T> = std::result::Result<T, ZenoError>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(ZenoError::Parameter(msg.into()))
}
