//! Error types shared across the crate.

use thiserror::Error;

/// Failures decoding a fixed-format byte payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("wrong length: expected {expected} bytes, got {actual}")]
    WrongLength { expected: usize, actual: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(&'static str),
    #[error("invariant violation: {0}")]
    InvariantViolation(&'static str),
}

/// Rejection sampling gave up before finding an acceptable candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("generation failed: {attempts} attempts exhausted")]
pub struct AttemptsExhausted {
    pub attempts: usize,
}

/// A scheme parameter outside the supported set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("unsupported n = {0}: expected one of 160, 192, 224, 256")]
    UnsupportedN(usize),
    #[error("unsupported k = {0}: expected one of 5, 6, 7, 8")]
    UnsupportedK(usize),
}
