use thiserror::Error;

/// Errors produced by grid construction, spectral operators, and the stepper.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Grid resolution outside the supported range.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A named parameter failed validation.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// Fractional order or Sobolev exponent below zero.
    #[error("negative exponent s = {s}; only s >= 0 is defined")]
    NegativeExponent { s: f64 },

    /// Array shape does not match the grid it claims to live on.
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    /// A non-finite value appeared in the state during time stepping.
    #[error("non-finite value in state at t = {t}")]
    NonFinite { t: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
