use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("non-unit series")]
    NonUnitSeries,
    #[error("variable sets differ")]
    VarSetMismatch,
    #[error("exponent of degree {degree} exceeds cutoff {cutoff}")]
    BeyondCutoff { degree: u32, cutoff: u32 },
    #[error("substitution breaks truncation soundness: {0}")]
    UnsoundSubstitution(String),
    #[error("defining function not real")]
    NotReal,
    #[error("normal form violated: {0}")]
    NormalForm(String),
    #[error("insufficient ambient cutoff: have {have}, need {need}")]
    InsufficientCutoff { have: u32, need: u32 },
    #[error("coordinate counts differ: {0} vs {1}")]
    CoordinateMismatch(usize, usize),
    #[error("linearly dependent basis: {0}")]
    DependentBasis(String),
    #[error("presentation not closed: {0}")]
    NotClosed(String),
    #[error("grading elements do not commute")]
    NonCommuting,
    #[error("singular matrix")]
    Singular,
    #[error("slice evaluation requires explicit v handling")]
    SliceRequiresV,
    #[error("not on T")]
    NotOnTube,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("angle {0} has no exact rotation matrix; use float mode")]
    UnsupportedAngle(String),
    #[error("map not invertible: {0}")]
    NonInvertibleMap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
