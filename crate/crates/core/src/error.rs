use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input points or matrices do not span the expected dimension.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A general-position assumption failed within tolerance, so the result
    /// cannot be certified either way.
    #[error("general position violation: {0}")]
    GeneralPosition(String),

    /// Adaptive quadrature exhausted its budget before reaching the
    /// requested absolute error.
    #[error("quadrature tolerance not met: requested {requested:e}, achieved {achieved:e}")]
    ToleranceNotMet { requested: f64, achieved: f64 },

    /// Two formulas for the same quantity disagreed beyond their combined
    /// error bound.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    /// Argument outside the supported range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
