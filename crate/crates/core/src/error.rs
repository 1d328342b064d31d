use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("invalid beta = {0}: beta must not be a non-negative even integer")]
    InvalidBeta(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate simplex: smallest singular value {smallest_sv:e} relative to diameter {diameter:e}")]
    DegenerateSimplex { smallest_sv: f64, diameter: f64 },

    #[error("linear system is numerically singular (condition estimate {estimate:e})")]
    Conditioning { estimate: f64 },

    #[error("parameters outside the hypotheses of this bound: {0}")]
    OutOfCase(String),

    #[error("unsupported (n, beta) regime: {0}")]
    UnsupportedRegime(String),

    #[error("scheme parameters violate the admissible ranges: {0}")]
    SchemeViolation(String),

    #[error("E_sigma norm diverges: {0}")]
    DivergentNorm(String),

    #[error("value out of floating-point range: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;
