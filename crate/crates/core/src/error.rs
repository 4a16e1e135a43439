use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the input was violated (non-unitary input, parameter
    /// out of range, dimension with no supported construction).
    #[error("domain error: {0}")]
    Domain(String),
    /// Matrix or vector shapes do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// Method exists but does not apply to the requested dimension.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A numerical routine failed to converge or produced unstable output.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Serialized input could not be understood.
    #[error("format error: {0}")]
    Format(String),
    /// Serialized input carries a format version this build does not read.
    #[error("unsupported format version {found}, expected {expected}")]
    Version { found: String, expected: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
