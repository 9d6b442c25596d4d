use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("point is not in the interior of the cone")]
    NotInterior,

    #[error("hyperplane does not cut a bounded section: {0}")]
    UnboundedSection(String),

    #[error("operation requires a {0} cone")]
    WrongVariant(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("centroid search exhausted its budget (best residual {best_residual:e})")]
    SearchBudgetExhausted { best_residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}
