use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("test function is not monotone: f({index}) = {prev} > f({next_index}) = {next}")]
    NonMonotone {
        index: usize,
        prev: f64,
        next_index: usize,
        next: f64,
    },

    #[error("degenerate test function: {0}")]
    Degenerate(String),

    #[error("test sensitivity underflows to zero at q = {q}")]
    DegenerateSensitivity { q: f64 },

    #[error("defective set has {got} items but the test function expects d = {expected}")]
    DefectiveCountMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("pool tester failed: {0}")]
    TesterFailure(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
