use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not complex symmetric (residual {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("operator norm {0} exceeds 1; not a contraction")]
    NotAContraction(f64),
    #[error("point {0} is outside the open unit disk")]
    OutOfDisk(String),
    #[error("contraction has a trivial defect space")]
    NoDefect,
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("trigonometric polynomial is negative ({0:.3e}) on the circle")]
    NotNonnegative(f64),
    #[error("operator is not C-symmetric for the given conjugation (residual {0:.3e})")]
    NotCSymmetric(f64),
    #[error("fixed-point condition violated (residual {0:.3e})")]
    FixedPointViolated(f64),
    #[error("C(b) differs from b (residual {0:.3e})")]
    CbNotB(f64),
    #[error("factorization failed: {0}")]
    FactorizationFailed(String),
    #[error("no coincidence found: {0}")]
    CoincidenceFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
