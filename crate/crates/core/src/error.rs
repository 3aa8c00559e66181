use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division is not exact: nonzero remainder")]
    NonExactDivision,
    #[error("point {0} is a base point of the evaluating map")]
    IndeterminatePoint(String),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("composition does not define a birational map")]
    DegenerateComposition,
    #[error("map carries no inverse")]
    MissingInverse,
    #[error("sampling exhausted after {0} attempts")]
    SamplingExhausted(usize),
    #[error("class is not timelike (self-intersection {0})")]
    NotTimelike(f64),
    #[error("curve is contracted by the word")]
    CurveContracted,
    #[error("reduced length {len} exceeds the exact-mode cap {cap}")]
    ExactLengthCap { len: usize, cap: usize },
    #[error("degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u64, cap: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("incompatible inputs: {0}")]
    Incompatible(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Mathematical degeneracy, as opposed to bad input or a broken invariant.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::IndeterminatePoint(_)
                | Error::DegenerateConfiguration(_)
                | Error::DegenerateComposition
                | Error::CurveContracted
                | Error::SamplingExhausted(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
