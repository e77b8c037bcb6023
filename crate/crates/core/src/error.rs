use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time grids differ")]
    GridMismatch,

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("delay of {shift} bins exceeds grid of {n_bins} bins")]
    DelayTooLarge { shift: i64, n_bins: usize },

    #[error("delay pushes {lost:.3e} of the norm off the grid")]
    DelayLeakage { lost: f64 },

    #[error("symmetry mismatch: {0}")]
    Symmetry(String),

    #[error("oracle cap exceeded: {0}")]
    CapExceeded(String),

    #[error("coherent truncation tail {tail:.3e} above threshold {threshold:.1e}")]
    Truncation { tail: f64, threshold: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
