use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid range: lower bound {lo} must be strictly below upper bound {hi}")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("{0} is not a grid point")]
    UnknownPoint(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected} features, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short stable identifier, used as a failure reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidRange { .. } => "invalid-range",
            Error::InvalidSize(_) => "invalid-size",
            Error::UnknownPoint(_) => "unknown-point",
            Error::InvalidInput(_) => "invalid-input",
            Error::Dimension { .. } => "dimension",
            Error::Singular(_) => "singular",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
