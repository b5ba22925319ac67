use thiserror::Error;

/// Errors raised by the library. Variants map onto the CLI exit-code contract:
/// budget problems are distinguished from mathematical precondition failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("matrix is singular or near-singular: {0}")]
    Singular(String),
    #[error("combination column leaves the unit cube: {0}")]
    OutOfCube(String),
    #[error("horizon too small: {0}")]
    HorizonTooSmall(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    /// A proved statement failed to hold numerically. Always a bug.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(format!($($arg)*))
    };
}
pub(crate) use invalid;
