use thiserror::Error;

/// Errors raised by the matrix primitives, problem construction and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IcpError {
    #[error("index ({row}, {col}) out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("dimension {n} exceeds the limit {limit} for {what}")]
    TooLarge { n: usize, limit: usize, what: &'static str },

    #[error("splitting error: {0}")]
    Splitting(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("uniqueness not established: {found} solution(s), {singular} singular active-set system(s)")]
    NotUnique { found: usize, singular: usize },
}

impl From<std::io::Error> for IcpError {
    fn from(e: std::io::Error) -> Self {
        IcpError::Io(e.to_string())
    }
}

pub type Result<T, E = IcpError> = std::result::Result<T, E>;
