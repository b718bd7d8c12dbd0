use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("minimal polynomial is not monic")]
    NonMonicPolynomial,
    #[error("cyclotomic order {0} is not an odd prime")]
    NonPrimeCyclotomicOrder(u64),
    #[error("minimal polynomial has degree zero")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is a zero divisor modulo the minimal polynomial")]
    NonInvertible,
    #[error("operands live in different ambient fields")]
    MixedAmbients,
    #[error("0^0 is undefined")]
    ZeroToZeroPower,
    #[error("prime {0} is unusable for this reduction")]
    BadPrime(u64),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquareMatrix { rows: usize, cols: usize },
    #[error("polynomial division leaves a nonzero remainder")]
    NotExactlyDivisible,
    #[error("coordinate {0} is zero")]
    ZeroCoordinate(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exponent {degree}^{iterate} exceeds the exponent budget {budget}")]
    ExponentBudgetExceeded { degree: u64, iterate: u64, budget: u64 },
    #[error("tuple of length {len} exceeds the {cols} available columns")]
    TupleTooLong { len: usize, cols: usize },
    #[error("matrix shape {rows}x{cols} is not valid here")]
    ShapeMismatch { rows: usize, cols: usize },
    #[error("every supplied prime was rejected")]
    AllPrimesBad,
    #[error("signed term sum is nonzero")]
    NonVanishingTotal,
    #[error("{0} terms is too many for exhaustive subset search")]
    TooManyTerms(usize),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("{d} is not a primitive root modulo {ell}")]
    NotPrimitiveRoot { d: u64, ell: u64 },
    #[error("tail coordinate {0} is zero")]
    ZeroTail(usize),
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("degenerate modulus: gcd({d}, {ell}) != 1")]
    DegenerateModulus { d: u64, ell: u64 },
    #[error("relation lattice has the wrong shape: {0}")]
    WrongRelationRank(String),
    #[error("point does not satisfy x0*x1 = x2*x3")]
    OffQuadric,
    #[error("invalid exponent tuple: {0}")]
    InvalidTuple(String),
    #[error("degree {0} is below 2")]
    InvalidDegree(u64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
