//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv error at row {row}: {msg}")]
    Csv { row: usize, msg: String },

    #[error("column {name:?} not found in csv header")]
    MissingColumn { name: String },

    #[error("unparseable value {value:?} at row {row}, column {column:?}")]
    BadValue {
        row: usize,
        column: String,
        value: String,
    },

    #[error("timestamps not strictly increasing at row {row}")]
    NonMonotoneTimestamps { row: usize },

    #[error("series is empty")]
    EmptySeries,

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target value is zero at index {index}; MAPE is undefined")]
    ZeroTarget { index: usize },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("singular design matrix")]
    SingularDesign,

    #[error("non-finite value encountered at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("cluster {cluster} has only {size} members (minimum {min}); try a smaller k")]
    ClusterTooSmall {
        cluster: usize,
        size: usize,
        min: usize,
    },

    #[error("optimizer did not converge; final loss {loss}")]
    NonConvergence { loss: f64 },

    #[error("residual passed the white-noise test (Ljung-Box p = {p:.4} >= 0.05); use force to train anyway")]
    WhiteNoiseGate { p: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Tags an error with the pipeline stage it came from.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

/// Extension for tagging results with a pipeline stage name.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
