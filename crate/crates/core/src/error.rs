use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    InvalidPrime(u64),
    #[error("precision cap must be at least 4, got {0}")]
    InvalidCap(i64),
    #[error("invalid extension: {0}")]
    InvalidExtension(String),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("division by an element indistinguishable from zero")]
    DivisionByIndistinguishableZero,
    #[error("exponential series diverges: valuation {valuation} is not above 1/(p-1)")]
    OutsideConvergenceDomain { valuation: String },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("element does not lie in the base field Q_p")]
    NotInBaseField,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not nilpotent at current precision")]
    NotNilpotent,
    #[error("matrix is not unipotent at current precision")]
    NotUnipotent,
    #[error("operators do not commute: {0}")]
    NotCommuting(String),
    #[error("module is not split with integer weights in [-{bound}, {bound}]: components cover {found} of {dim} dimensions")]
    NotSplitInBox { bound: i64, found: usize, dim: usize },
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("matrix is singular at current precision")]
    Singular,
    #[error("element is not in the parabolic subgroup: {0}")]
    NotInParabolic(String),
    #[error("element is not diagonal")]
    NotDiagonal,
    #[error("determinant is not 1 at current precision")]
    NotDeterminantOne,
    #[error("Lie algebra element acts non-nilpotently: {0}")]
    NotNilpotentAction(String),
    #[error("module fails the category requirements for lifting: {0}")]
    NotLiftable(String),
    #[error("character needs sqrt(p) but the coefficient field does not contain it")]
    MissingSqrtP,
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid logarithm data: {0}")]
    InvalidLog(String),
    #[error("logarithm does not map the subtorus into its Lie algebra")]
    NotTangentToSubtorus,
    #[error("truncated basis would have {size} elements, above the limit {limit}")]
    DepthOverflow { size: usize, limit: usize },
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { field: field.into(), message: message.into() }
    }
}
