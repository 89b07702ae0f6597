//! Error type shared by all solver modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum UtmError {
    #[error("(alpha - 1)/2 must be a positive integer, got alpha = {0}")]
    AlphaParity(u32),
    #[error("data violates the edge decay floor: {context} (max edge magnitude {value:.3e}, floor {floor:.3e})")]
    EdgeDecay {
        context: String,
        value: f64,
        floor: f64,
    },
    #[error("Sobolev index s = {0} outside the admissible range {1}")]
    RangeS(f64, &'static str),
    #[error("non-finite sample encountered in {0}")]
    NonFinite(String),
    #[error("axis mismatch: expected {expected}, got {got}")]
    AxisMismatch { expected: String, got: String },
    #[error("k2 node {0} lies in the upper half plane (Im > 0)")]
    UpperHalfK2(num_complex::Complex64),
    #[error("complex exponent {0:.3e} exceeds the floating point range")]
    Overflow(f64),
    #[error("contour truncation K_max = {kmax} too small (need > {need})")]
    TruncationTooSmall { kmax: f64, need: f64 },
    #[error("boundary datum has support outside (0, 2): max magnitude {0:.3e}")]
    SupportViolation(f64),
    #[error("time horizon T = {0} must be < 1 for the zero-extension path")]
    HorizonTooLarge(f64),
    #[error("need at least {need} nodes near the boundary, grid has {got}")]
    TooFewNodes { need: usize, got: usize },
    #[error("Picard iteration is not contracting (ratios {0:?} over the last iterations)")]
    NoContraction(Vec<f64>),
    #[error("adaptive quadrature failed to converge in {0}")]
    NonConvergent(String),
    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),
    #[error("grid construction: {0}")]
    Grid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, UtmError>;
