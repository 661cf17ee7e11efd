use thiserror::Error;

use crate::integrators::DenseSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("t = {t} lies outside the solution span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    /// The step size collapsed below the underflow floor. The partial
    /// solution up to `t` is kept for inspection.
    #[error("step size {h:e} underflowed at t = {t} (stiffness or blow-up)")]
    StepSizeUnderflow {
        t: f64,
        h: f64,
        partial: Box<DenseSolution>,
    },

    #[error("solution diverged (non-finite state) at step {step}, t = {t}")]
    Divergence { step: usize, t: f64 },

    #[error("system does not provide a Jacobian")]
    MissingJacobian,

    #[error("threshold {threshold} not reached within horizon t = {horizon}")]
    NotReached { threshold: f64, horizon: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("pseudo-orbit cannot be shadowed by backward iteration: {0}")]
    Unshadowable(String),

    #[error("invalid format string {0:?} (expected e.g. \"e3m4\")")]
    InvalidFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepSizeUnderflow { .. } | Error::Divergence { .. } | Error::NotReached { .. }
        )
    }
}
