use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty space: S_{0} has dimension 0")]
    EmptySpace(u32),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("data exhausted: {what} needs n = {needed}, table ends at {available}")]
    DataExhausted {
        what: String,
        needed: u64,
        available: u64,
    },
    #[error("Deligne bound violated: |lambda(p)| = {value} at p = {p}")]
    DeligneViolation { p: u64, value: f64 },
    #[error("anomaly: {0}")]
    Anomaly(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("data integrity: {0}")]
    DataIntegrity(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn accuracy(msg: impl Into<String>) -> Self {
        Error::Accuracy(msg.into())
    }
}
