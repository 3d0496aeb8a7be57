use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (supported: 2..=6 for geometry, 1..=6 for algebra)")]
    UnsupportedDimension(usize),

    #[error("degenerate {what}: |det| = {det:e} below threshold {threshold:e}")]
    Degenerate {
        what: &'static str,
        det: f64,
        threshold: f64,
    },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("signature mismatch: expected (p={expected_p}, q={expected_q}), eigenvalues give (p={found_p}, q={found_q})")]
    SignatureMismatch {
        expected_p: usize,
        expected_q: usize,
        found_p: usize,
        found_q: usize,
    },

    #[error("consistency check failed: {what} (residual {residual:e}, tolerance {tolerance:e})")]
    CheckFailed {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error(
        "automatic differentiation requested on a field that only supports finite differences"
    )]
    AdOnFdOnlyField,

    #[error("finite-difference step {step:e} underflows at coordinate {coord}")]
    FdStepUnderflow { step: f64, coord: f64 },

    #[error("derivative nesting exceeds the supported depth")]
    NestingTooDeep,

    #[error("unknown sign pattern {0:?}")]
    UnknownPattern(String),

    #[error("field evaluation failed: {0}")]
    Evaluation(String),
}
