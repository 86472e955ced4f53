use thiserror::Error;

/// Errors raised by the algebraic and combinatorial routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("unknown coefficient ring `{0}`")]
    UnknownRing(String),
    #[error("operation requires a field, got {0}")]
    NotAField(String),
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("cannot map {value} into {ring}")]
    NotRepresentable { value: String, ring: String },
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("invalid partition or composition: {0}")]
    InvalidShape(String),
    #[error("{0} is not a hook partition")]
    NotAHook(String),
    #[error("tableau is not standard: {0}")]
    NotStandard(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("generator index {index} out of range for n = {n}")]
    GeneratorOutOfRange { index: usize, n: usize },
    #[error("w_(a,b) needs a + b <= n, got a = {a}, b = {b}, n = {n}")]
    BlockSwapTooLarge { a: usize, b: usize, n: usize },
    #[error("module shape mismatch")]
    ShapeMismatch,
    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),
    #[error("divisibility chain violated at position {0}")]
    BrokenChain(usize),
    #[error("divisibility certificate refused at entry ({row}, {col}): {reason}")]
    CertificateRefused { row: usize, col: usize, reason: String },
    #[error("Gram matrices are not proportional at entry ({0}, {1})")]
    NotProportional(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
