use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix {index} is not square or has the wrong dimension (expected {expected})")]
    NotSquare { index: usize, expected: usize },
    #[error("effect {index} is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { index: usize, deviation: f64 },
    #[error("effect {index} is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { index: usize, min_eigenvalue: f64 },
    #[error("effects do not sum to the identity (max entry deviation {deviation:e})")]
    IncompleteSum { deviation: f64 },
    #[error("state vector is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("matrix is not unitary (max deviation of U^dagger U from I: {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("eigensolver did not converge after {rotations} rotations (off-diagonal norm {off:e})")]
    ConvergenceFailure { rotations: usize, off: f64 },
    #[error("value out of range: {0}")]
    RangeViolation(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("enumeration too large: {count} exceeds limit {limit}")]
    TooLarge { count: u128, limit: u128 },
    #[error("closed form requires dim <= min outcome count (dim {dim}, min outcomes {min_outcomes})")]
    NotApplicable { dim: usize, min_outcomes: usize },
    #[error("closed form only exists for n = 2 or n = 3, got n = {0}")]
    UnsupportedN(usize),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("no classical bound available: {0}")]
    BoundUnavailable(String),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("malformed input: {0}")]
    Parse(String),
}
