//! Shared error type for the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty location set")]
    EmptyLocationSet,

    #[error("non-finite coordinate in location row {row}")]
    NonFiniteCoordinate { row: usize },

    #[error("duplicate location rows {first} and {second}")]
    DuplicateLocation { first: usize, second: usize },

    #[error("kernel decay must be positive, got {0}")]
    InvalidDecay(f64),

    #[error("invalid site ordering: {0}")]
    InvalidOrdering(String),

    #[error("neighbor budget must be between 1 and {max}, got {got}")]
    InvalidNeighborBudget { got: usize, max: usize },

    #[error("degenerate conditional variance {value:.3e} at ordered row {row}")]
    DegenerateNngpRow { row: usize, value: f64 },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rank-deficient matrix: column {col} residual norm below threshold")]
    RankDeficient { col: usize },

    #[error("unidentified regression/loadings: augmented normal equations are singular")]
    UnidentifiedCoefficients,

    #[error("degenerate mean direction")]
    DegenerateMeanDirection,

    #[error("unknown parameter block '{0}'")]
    UnknownBlock(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("chain store: {0}")]
    ChainStore(String),

    #[error("iteration {index}: {source}")]
    Iteration {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("json error in {path}: {message}")]
    Json { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable code, used by the CLI's error reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyLocationSet
            | Error::NonFiniteCoordinate { .. }
            | Error::DuplicateLocation { .. }
            | Error::InvalidInput(_) => "E_DATA",
            Error::InvalidDecay(_)
            | Error::InvalidNeighborBudget { .. }
            | Error::InvalidConfig(_) => "E_CONFIG",
            Error::InvalidOrdering(_)
            | Error::DegenerateNngpRow { .. }
            | Error::RankDeficient { .. }
            | Error::UnidentifiedCoefficients
            | Error::DegenerateMeanDirection => "E_NUMERIC",
            Error::LengthMismatch { .. }
            | Error::DimensionMismatch(_)
            | Error::UnknownBlock(_) => "E_SHAPE",
            Error::ChainStore(_) => "E_CHAIN",
            Error::Iteration { source, .. } => source.code(),
            Error::Io { .. } | Error::Csv { .. } | Error::Json { .. } => "E_IO",
        }
    }
}
