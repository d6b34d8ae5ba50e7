use thiserror::Error;

/// Errors reported by the library.
///
/// Verification *failures* (a count exceeding a bound, a congruence that does
/// not hold) are not errors; they are carried in reports. Errors are reserved
/// for inputs that violate an operation's contract.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gcd of (0, 0) is undefined")]
    BothZero,
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("zero vector not allowed here")]
    ZeroVector,
    #[error("{0} is not a split prime above p \u{2261} 1 mod 4")]
    NotSplitPrime(String),
    #[error("matrix is not self-adjoint: entry ({0},{1})")]
    NotSelfAdjoint(usize, usize),
    #[error("matrix is not positive definite (leading minor {0} \u{2264} 0)")]
    NotPositiveDefinite(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("constraint vectors are linearly dependent")]
    DependentConstraints,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("valuation precondition failed: {0}")]
    ValuationPrecondition(String),
    #[error("minor divisibility precondition failed: {0}")]
    MinorDivisibility(String),
    #[error("|det|^(2/n) is irrational for this coset; operation needs a rational power")]
    IrrationalDetPower,
    #[error("no rational point found in envelope at denominator bound {0}")]
    NoPointFound(u64),
    #[error("window schedule exhausted after {0} windows without stabilization")]
    WindowExhaustion(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
