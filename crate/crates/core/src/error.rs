use thiserror::Error;

use crate::pulselang::ParseError;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported matrix dimension {0} (only 2 and 4 are supported)")]
    UnsupportedDimension(usize),

    #[error("matrix is not unitary (max |U†U - I| = {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (max |M - M†| = {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error(
        "imaginary part of the expectation value is {0:e}, observable or state is not Hermitian"
    )]
    ComplexExpectation(f64),

    #[error("non-unitary event `{0}` in sequence; gradient events are evaluated by `channels`")]
    NonUnitaryEvent(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
