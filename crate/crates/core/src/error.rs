//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("solution set empty: system is inconsistent")]
    InconsistentSystem,

    #[error("invalid sampler specification: {0}")]
    InvalidSpec(String),

    #[error("unknown sampler name: {0}")]
    UnknownSampler(String),

    #[error("streaming source exhausted after {0} draws")]
    StreamExhausted(u64),

    #[error("zero residual: nothing to select (caller should have stopped)")]
    ZeroResidual,

    #[error(
        "collection of {count} vectors exceeds the combinatorial cap {cap}; \
         use the random-search estimator instead of exhaustive enumeration"
    )]
    CombinatorialCap { count: usize, cap: usize },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("parse error in {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("io error for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Invalid(String),
}
