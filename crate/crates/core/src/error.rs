use thiserror::Error;

/// Errors raised by the numerical kernels and constructors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KsError {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("unsupported primitive convention: {0}")]
    UnsupportedConvention(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, KsError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(KsError::Domain(msg.into()))
}
