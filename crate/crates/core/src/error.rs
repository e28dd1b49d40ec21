use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("beta must not be an integer")]
    IntegerBeta,
    #[error("beta must be greater than 1")]
    BetaNotGreaterThanOne,
    #[error("polynomial degree {0} exceeds the supported maximum of {max}", max = crate::algebra::MAX_DEGREE)]
    DegreeTooLarge(usize),
    #[error("isolating interval must bracket a sign change of the polynomial")]
    NoSignChange,
    #[error("remainder must be strictly positive")]
    NonPositiveRemainder,
    #[error("letter {letter} is outside the alphabet 0..{alphabet}")]
    AlphabetError { letter: u32, alphabet: u32 },
    #[error("word is not admissible")]
    Inadmissible,
    #[error("word is not a prefix of the expansion digits")]
    NotAPrefix,
    #[error("enumeration budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("certified truncation error {slack} exceeds tolerance {tol}")]
    TailTruncationError { slack: f64, tol: f64 },
    #[error("target window does not fit the volume")]
    WindowTooLarge,
    #[error("margin check failed: margin {0} is not positive")]
    MarginViolated(f64),
    #[error("digit stream produced {0} consecutive zeros; diagnostic guard tripped")]
    ZeroRunDiagnostic(usize),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("points are not conjugate")]
    NotConjugate,
    #[error("window mismatch: expected {expected:?}, got {got:?}")]
    WindowMismatch { expected: (i64, i64), got: (i64, i64) },
}

pub type Result<T> = std::result::Result<T, Error>;
