use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("validation failed for {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (u32, u32),
        found: (u32, u32),
    },

    #[error("RLE counts sum to {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("too few points: need at least {needed}, got {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("degenerate point cloud: all points coincide")]
    DegenerateCloud,

    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("insufficient points: need {needed}, got {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("diameter must be positive, got {0}")]
    NonPositiveDiameter(f64),

    #[error("average precision needs at least one ground-truth instance")]
    NoTruth,

    #[error("series is empty")]
    EmptySeries,

    #[error("actual value is zero at index {index}; MAPE undefined")]
    ZeroActual { index: usize },

    #[error("series is constant or too short; correlation undefined")]
    ConstantSeries,

    #[error("predictions and truth share no keys")]
    NoOverlap,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
