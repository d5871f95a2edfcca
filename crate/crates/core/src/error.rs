use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("{what} has {size} candidates, above the enumeration cap of {cap}")]
    TooLarge { what: String, size: u128, cap: u64 },
    #[error("unsupported ring parameters: {0}")]
    UnsupportedCombination(String),
    #[error("operands belong to different rings")]
    RingMismatch,
    #[error("dimension mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("index {index} outside 1..={bound}")]
    BadIndex { index: usize, bound: usize },
    #[error("no primitive {n}-th root of unity: {n} does not divide q - 1 = {q_minus_one}")]
    NoRoot { n: u64, q_minus_one: u64 },
    #[error("not a primitive {n}-th root of unity: {reason}")]
    BadRoot { n: usize, reason: String },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("gcd({a}, {b}) != 1")]
    NotCoprime { a: u64, b: u64 },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("parse error at position {pos}: expected {expected}, found {found}")]
    Parse {
        pos: usize,
        expected: String,
        found: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
