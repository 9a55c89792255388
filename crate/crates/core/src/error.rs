use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, EmpError>;

#[derive(Debug, Error)]
pub enum EmpError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph has no edge weights")]
    MissingWeights,

    #[error("{scope} attribute {index} is not available")]
    MissingAttribute { scope: &'static str, index: usize },

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    /// A complex whose grading or face structure violates the filtration invariants.
    #[error("malformed filtered complex: {0}")]
    MalformedComplex(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing dataset file {0}")]
    MissingFile(PathBuf),

    #[error("{file}:{line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("inconsistent dataset: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl EmpError {
    /// True for errors caused by the caller's configuration rather than by the data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            EmpError::Config(_)
                | EmpError::MissingWeights
                | EmpError::MissingAttribute { .. }
                | EmpError::InvalidThresholds(_)
                | EmpError::ShapeMismatch(_)
                | EmpError::LengthMismatch { .. }
        )
    }
}
