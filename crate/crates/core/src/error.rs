use thiserror::Error;

use crate::grid::GridError;
use crate::quat::QuatError;

/// Failures of the transform routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("invalid frequency window: {0}")]
    InvalidWindow(String),
    #[error("spectrum was produced by {found}, expected {expected}")]
    ProvenanceMismatch { expected: String, found: String },
    #[error("fast path needs power-of-two sizes, got {0}x{1}")]
    NotPowerOfTwo(usize, usize),
    #[error("fast path supports only the canonical axes (i, j)")]
    NonCanonicalAxes,
    #[error("input has non-zero imaginary parts")]
    NonRealInput,
    #[error("side mismatch: {0}")]
    SideMismatch(String),
    #[error("LCT parameter b is zero; only the forward chirp branch is defined")]
    DegenerateB,
    #[error("degenerate angle: sin({0}) = 0")]
    DegenerateAngle(f64),
    #[error("invalid LCT matrix: {0}")]
    InvalidParams(String),
    #[error("only the negative-exponent transform relates to the two-sided QFT")]
    SignConvention,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Axis(#[from] QuatError),
}
