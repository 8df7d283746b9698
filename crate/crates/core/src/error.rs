use thiserror::Error;

use crate::spectral::FieldState;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{context}: non-finite value at index {index}")]
    NonFinite { context: &'static str, index: usize },

    #[error("length mismatch in {context}: expected {expected}, got {got}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("grid mismatch in {0}")]
    GridMismatch(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A non-finite value appeared while evolving; `last_good` is the last
    /// state whose samples were all finite.
    #[error("blow-up at t = {time}: {reason}")]
    BlowUp {
        time: f64,
        reason: String,
        last_good: Option<Box<FieldState>>,
    },

    #[error("peakon collision: pair ({i}, {j}) separated by {distance:e} at t = {time}")]
    Collision {
        i: usize,
        j: usize,
        distance: f64,
        time: f64,
    },

    #[error("map is not strictly monotone: slope {slope:e} at node {index}")]
    NotMonotone { index: usize, slope: f64 },

    #[error("inconsistent evaluation in {context}: gap {gap:e} exceeds {tolerance:e}")]
    Inconsistent {
        context: &'static str,
        gap: f64,
        tolerance: f64,
    },

    #[error("constraint violated: {0}")]
    Constraint(String),
}
