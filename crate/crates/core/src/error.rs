use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not upper triangular with nonzero diagonal")]
    NotInvertibleTriangular,
    #[error("production step produced a non-integral or negative entry at index {index}: {value}")]
    NonIntegralCount { index: usize, value: String },
    #[error("negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("matrix is not primitive")]
    NotPrimitive,
    #[error("witness vector must be strictly positive (index {0})")]
    NonPositiveWitness(usize),
    #[error("configuration carries no coordinates")]
    MissingCoordinates,
    #[error("too many admissible edges for the enumerator: {0} (limit 128)")]
    TooManyEdges(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("value outside the domain: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
