use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("phase-space order {0} is outside the supported range 1..=20")]
    InvalidOrder(usize),

    #[error("phase-space dimension must be 1 or 3, got {0}")]
    InvalidDimension(usize),

    #[error("expected {expected} derivative entries, got {got}")]
    DerivativeCount { expected: usize, got: usize },

    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("mode number must be >= 1")]
    InvalidMode,

    #[error("coordinate {eta} lies outside the well [0, {width}]")]
    OutsideWell { eta: f64, width: f64 },

    #[error("theta series requires Im(tau) > 0, got {0}")]
    NonPositiveImaginaryPart(f64),

    #[error("theta series did not converge within K = {k_max} (last term ratio {last_ratio:e})")]
    NonConvergent { k_max: usize, last_ratio: f64 },

    #[error("invalid truncation policy: {0}")]
    InvalidTruncation(&'static str),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("{0}")]
    InvalidArgument(String),
}
