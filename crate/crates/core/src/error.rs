use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid order specification `{0}`")]
    InvalidOrder(String),

    #[error("empty exponent set")]
    EmptyExponentSet,

    #[error("the zero section has no valuation")]
    ZeroSection,

    #[error("basis element {index} is linearly dependent on the preceding elements")]
    LinearlyDependent { index: usize },

    #[error("coordinate change is not invertible: {0}")]
    NotInvertible(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("empty point set")]
    EmptyPointSet,

    #[error("dimension {0} is not supported (at most 4)")]
    UnsupportedDimension(usize),

    #[error("point outside the nonnegative orthant")]
    NotInOrthant,

    #[error("polytope is not full-dimensional (affine dimension {affine_dim} < {n})")]
    NotFullDimensional { affine_dim: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
