use thiserror::Error;

/// Errors raised by parameter generation, the arithmetic core and the
/// simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no prime of {bits} bits congruent to 1 mod {n}")]
    NoPrimeFound { bits: u32, n: usize },

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("modulus {0} is not prime")]
    NotPrime(String),

    #[error("modulus {0} must be odd and at least 3")]
    InvalidModulus(String),

    #[error("no primitive {n}-th root of unity modulo {q}: {n} does not divide q - 1")]
    NoRootOfUnity { q: String, n: usize },

    #[error("digit size must be at least one bit")]
    ZeroDigitSize,

    #[error("radix 2^{r_exp} is not usable for modulus {q}: {reason}")]
    InvalidRadix {
        q: String,
        r_exp: u32,
        reason: &'static str,
    },

    #[error("{word} holds {capacity} bits but this context needs {required}")]
    WordTooNarrow {
        word: &'static str,
        capacity: u32,
        required: u32,
    },

    #[error("{what} = {value} is out of range (must be < {bound})")]
    OutOfRange {
        what: &'static str,
        value: String,
        bound: String,
    },

    #[error("REDC input {value} violates p < qR = {limit}")]
    RedcContract { value: String, limit: String },

    #[error("digit stream has {got} digits, expected {expected}")]
    StreamLength { expected: usize, got: usize },

    #[error("digit carry left over at the end of a word ({unit})")]
    DigitOverflow { unit: &'static str },

    #[error("operand stream interrupted mid-word")]
    StreamBubble,

    #[error("input has {got} elements, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),

    #[error("pipeline did not drain within {0} cycles")]
    Stalled(u64),

    #[error("pipeline has no input loaded")]
    NotLoaded,

    #[error("malformed document: {0}")]
    Document(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
