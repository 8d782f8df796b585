use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the congruence pipeline and its supporting modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("entry ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("zero coefficient stored at ({row}, {col})")]
    ZeroCoefficient { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("coefficient {coeff} at ({row}, {col}) exceeds magnitude 1; class orientations are inconsistent")]
    Orientation { row: usize, col: usize, coeff: i32 },
    #[error("signature of a zero vector is undefined")]
    ZeroVector,
    #[error("invalid class partition: {0}")]
    InvalidPartition(String),
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("non-finite coordinate in point {0}")]
    NonFinite(usize),
    #[error("tolerance must be a positive finite number, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid accumulator complex: {0}")]
    InvalidAccumulator(String),
    #[error("invalid quotient complex: {0}")]
    InvalidQuotient(String),
    #[error("chain constraint violated: delta1 * delta0 has {nonzeros} nonzero entries")]
    ChainConstraint { nonzeros: usize },
    #[error("engines disagree: {0}")]
    EngineDisagreement(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("schema error in {path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-parsable tag for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "INDEX_RANGE",
            Error::DuplicateEntry { .. } => "DUPLICATE_ENTRY",
            Error::ZeroCoefficient { .. } => "ZERO_COEFF",
            Error::DimensionMismatch(_) => "DIM_MISMATCH",
            Error::Orientation { .. } => "ORIENTATION",
            Error::ZeroVector => "ZERO_VECTOR",
            Error::InvalidPartition(_) => "PARTITION",
            Error::EmptyCloud => "EMPTY_CLOUD",
            Error::NonFinite(_) => "NON_FINITE",
            Error::InvalidTolerance(_) => "TOLERANCE",
            Error::InvalidAccumulator(_) => "ACCUMULATOR",
            Error::InvalidQuotient(_) => "QUOTIENT",
            Error::ChainConstraint { .. } => "DD_NONZERO",
            Error::EngineDisagreement(_) => "ENGINE_DISAGREE",
            Error::InvalidParameter(_) => "PARAMETER",
            Error::Schema { .. } => "SCHEMA",
            Error::Io { .. } => "IO",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
