use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum AfdError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point outside the open cone: {0}")]
    OutsideCone(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("tolerance not reached: best estimate {est_re:e}{est_im:+e}i, error bound {bound:e}")]
    ToleranceNotReached { est_re: f64, est_im: f64, bound: f64 },

    #[error("degenerate candidate: residual-norm fraction {defect:e} below threshold")]
    Degenerate { defect: f64 },

    #[error("dictionary exhausted at point {point}: derivative order {needed} exceeds cap {cap}")]
    DictionaryExhausted { point: String, needed: u32, cap: u32 },

    #[error("residual numerically zero")]
    ResidualZero,

    #[error("Gram matrix ill-conditioned (estimate {cond:e}): near-duplicate points {points}")]
    IllConditioned { cond: f64, points: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AfdError>;
