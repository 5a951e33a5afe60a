use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed manifold file: {0}")]
    Malformed(String),

    #[error("index length mismatch: index {index:?} has length {len}, expected dim {dim}")]
    IndexLength {
        index: Vec<i64>,
        len: usize,
        dim: usize,
    },

    #[error("index out of range: index {index:?} must lie in 1..={rank}")]
    IndexRange { index: Vec<i64>, rank: usize },

    #[error("conflicting duplicate entries for sorted index {index:?}: {first} vs {second}")]
    ConflictingDuplicate {
        index: Vec<usize>,
        first: f64,
        second: f64,
    },

    #[error("intersection form is identically zero")]
    ZeroForm,

    #[error("expected {expected} arguments, got {got}")]
    ArgumentCount { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The class lies outside the volume cone.
    #[error("non-positive volume {vol}")]
    NonPositiveVolume { vol: f64 },

    /// The class has positive volume but the Hessian metric is not positive definite there.
    #[error("indefinite metric: smallest/largest eigenvalue ratio {ratio}")]
    IndefiniteMetric { ratio: f64 },

    #[error("degenerate plane: |u ∧ v|² = {area} is below tolerance")]
    DegeneratePlane { area: f64 },

    /// The geodesic reached an inadmissible point at parameter `t`.
    #[error("geodesic left the admissible cone at t = {t}")]
    LeftCone { t: f64 },

    #[error("normalization failure: {0}")]
    Normalization(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable name, used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Malformed(_) => "Malformed",
            Error::IndexLength { .. } => "IndexLengthMismatch",
            Error::IndexRange { .. } => "IndexOutOfRange",
            Error::ConflictingDuplicate { .. } => "ConflictingDuplicate",
            Error::ZeroForm => "ZeroForm",
            Error::ArgumentCount { .. } => "ArgumentCount",
            Error::Dimension(_) => "DimensionMismatch",
            Error::NonPositiveVolume { .. } => "NonPositiveVolume",
            Error::IndefiniteMetric { .. } => "IndefiniteMetric",
            Error::DegeneratePlane { .. } => "DegeneratePlane",
            Error::LeftCone { .. } => "LeftCone",
            Error::Normalization(_) => "Normalization",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Whether the error signals a point outside the admissible cone.
    pub fn is_inadmissible(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveVolume { .. }
                | Error::IndefiniteMetric { .. }
                | Error::LeftCone { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
