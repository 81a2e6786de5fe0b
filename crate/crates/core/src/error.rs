use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("{what} of size {size} exceeds the size cap {cap}")]
    SizeCap {
        what: &'static str,
        size: u64,
        cap: u64,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("z2 must be w-1 or w (z2 = 1 when w = 1); got w = {w}, z2 = {z2}")]
    InvalidZ2 { w: u64, z2: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("element {index} is out of range for a set of order {order}")]
    OutOfRange { index: u64, order: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("verification failed: {0}")]
    Verification(String),
}
