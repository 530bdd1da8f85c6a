use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mesh validation failed: {0}")]
    MeshValidation(String),

    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("basis evaluation failed: {0}")]
    BasisEvaluation(String),

    #[error("element geometry error: {0}")]
    Geometry(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("point lookup failed: {0}")]
    Lookup(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
