use thiserror::Error;

/// Errors raised by the census and verification toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is invalid (every modulus must be at least 2)")]
    InvalidModulus(usize),

    #[error("group order {order} exceeds the enumeration ceiling {ceiling}")]
    CeilingExceeded { order: u128, ceiling: usize },

    #[error("index {index} out of range for a group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("{op}: size guard exceeded ({got} > {limit})")]
    GuardExceeded {
        op: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("{0}: empty input")]
    EmptyInput(&'static str),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("A + B covers the whole group, so its complement is empty")]
    EmptyComplement,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0} has no subgroup of index 2")]
    NoIndexTwoSubgroup(String),

    #[error("the trivial group has no proper subgroup")]
    TrivialGroup,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown battery `{0}`")]
    UnknownBattery(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical self-check failed: {0}")]
    NumericalCheck(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
