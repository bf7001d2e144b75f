use thiserror::Error;

/// Errors raised while building, certifying or simulating feedback schemes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported constellation `{0}`")]
    UnsupportedConstellation(String),

    #[error("no built-in {0}x{0} rotation; supply one with a rotation file")]
    RotationUnavailable(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("beamforming vector {index} has norm {norm}, expected 1")]
    InvalidBeamformer { index: usize, norm: f64 },

    #[error("bit rate mismatch: {0}")]
    BitrateMismatch(String),

    #[error("expected {expected} bits, got {got}")]
    BitLength { expected: usize, got: usize },

    #[error("enumeration of {size} items exceeds the cap of {cap}")]
    EnumerationTooLarge { size: f64, cap: u64 },

    #[error("difference vector for code {0} is zero")]
    InvalidDifference(usize),

    #[error("slope undefined: {0}")]
    SlopeUndefined(String),

    #[error("cannot power-normalize: {0}")]
    PowerNormalization(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
            _ => Error::Parse(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
