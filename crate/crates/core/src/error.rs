use thiserror::Error;

/// Errors raised by the matrix, cone and harness layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: |a[{row}][{col}] - conj(a[{col}][{row}])| = {deviation:e}")]
    NonHermitian { row: usize, col: usize, deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("function undefined at eigenvalue {eigenvalue}")]
    DomainError { eigenvalue: f64 },

    #[error("eigenvalue {eigenvalue} lies within {gap:e} of interval endpoint {endpoint}")]
    AmbiguousBoundary { eigenvalue: f64, endpoint: f64, gap: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("function `{name}` is not strictly positive")]
    NotStrictlyPositive { name: String },

    #[error("empty collection")]
    EmptyCollection,

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("zero function")]
    ZeroFunction,

    #[error("not a preserver: supp of `{point}` is empty")]
    NotAPreserver { point: String },

    #[error("supp sets of `{first}` and `{second}` overlap")]
    DisjointnessViolation { first: String, second: String },

    #[error("unknown gallery example `{0}`")]
    UnknownExample(String),

    #[error("invalid input at `{field}`: {message}")]
    InvalidInput { field: String, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
