use thiserror::Error;

/// Errors raised by the algebra, module, form and suite layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid algebra shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("element is not positive: block {block} has eigenvalue {min_eigenvalue:e}")]
    NotPositive { block: usize, min_eigenvalue: f64 },

    #[error(
        "element is not invertible: block {block} has smallest singular value {min_singular:e}"
    )]
    NotInvertible { block: usize, min_singular: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("form is not strong: no invertible diagonal value found in {budget} trials")]
    NotStrong { budget: usize },

    #[error("unsupported shape {shape:?} for arity {arity}: {reason}")]
    UnsupportedShape {
        shape: Vec<usize>,
        arity: usize,
        reason: String,
    },

    #[error("unknown suite id `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
