use thiserror::Error;

/// Errors raised by the grid, metric, solver and DN-map layers.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-positive {what} ({value:e}) at node {node}")]
    NonPositive {
        what: &'static str,
        value: f64,
        node: usize,
    },

    #[error("unsupported dimension: {0}")]
    Dimension(String),

    #[error("unsupported metric: {0}")]
    UnsupportedMetric(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("CFL violation: {0}")]
    Cfl(String),

    #[error("invalid boundary source: {0}")]
    Source(String),

    #[error("invalid boundary patch: {0}")]
    Patch(String),

    #[error("metadata mismatch: {0}")]
    Metadata(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("memory guard: {0}")]
    Memory(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
