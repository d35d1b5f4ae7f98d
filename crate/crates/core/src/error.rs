use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("mask has no foreground cell")]
    EmptySet,
    #[error("set is degenerate (all cells inside or all cells outside)")]
    DegenerateSet,
    #[error("inputs are defined on different grids")]
    GridMismatch,
    #[error("bad weights: {0}")]
    BadWeights(String),
    #[error("non-finite value at cell ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("no closed form for model: {0}")]
    NoClosedForm(String),
    #[error("shape family is not separable: {0}")]
    NotSeparable(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("boundary is empty")]
    EmptyBoundary,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid random set model: {0}")]
    InvalidModel(String),
    #[error("no input given")]
    EmptyInput,
    #[error("inputs must be all images or a single model file")]
    MixedInputs,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown experiment `{name}` (valid: {valid})")]
    UnknownExperiment { name: String, valid: String },
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
