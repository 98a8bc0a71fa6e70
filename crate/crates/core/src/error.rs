use thiserror::Error;

/// Errors raised by model construction, interval constructors and metrics.
#[derive(Debug, Error)]
pub enum Error {
    /// An input has the wrong dimension (point vs. lengthscales, etc.).
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A scalar argument is outside its admissible range.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// Cholesky factorization hit a non-positive pivot; the matrix is not
    /// numerically positive definite. `pivot` is the failing row index.
    #[error("matrix not positive definite at pivot {pivot}")]
    NotPositiveDefinite { pivot: usize },

    /// Two design points coincide, which makes the noise-free kernel matrix
    /// singular and leave-one-out prediction ill-defined.
    #[error("design points {i} and {j} coincide")]
    DuplicatePoint { i: usize, j: usize },

    /// The requested level cannot be certified by the available scores
    /// (jackknife+ requires alpha <= n/(n+1)).
    #[error("level {alpha} not achievable with {n} leave-one-out scores")]
    LevelUnachievable { alpha: f64, n: usize },

    /// The conformal quantile rank exceeds the number of calibration scores,
    /// so the interval would be unbounded.
    #[error(
        "calibration set of size {n} too small for level {alpha}: interval would be unbounded"
    )]
    CalibrationTooSmall { alpha: f64, n: usize },

    /// Unrecognized test-function tag.
    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    /// A collection argument that must be nonempty was empty.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A level grid passed to `iae` is not strictly increasing inside (0,1).
    #[error("grid is not strictly increasing inside (0,1)")]
    UnsortedGrid,

    /// Index out of range (leave-one-out fold selection, etc.).
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// A numerical procedure failed beyond recovery (all optimizer starts
    /// rejected, degenerate leave-one-out variance, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
