use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),

    #[error("generator left the natural numbers at raw index {raw_index} (value {value})")]
    Diverged { raw_index: usize, value: BigInt },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input")]
    EmptyInput,

    #[error("window is complete only up to {covered}; extend it to cover {required}")]
    Incomplete { required: BigInt, covered: BigInt },

    #[error("dense convolution window of {width} cells exceeds the limit {limit}; use sparse mode")]
    DenseLimit { width: u128, limit: u128 },

    #[error("could not certify the tail of the sequence after {raw_terms} raw terms")]
    Uncertified { raw_terms: usize },

    #[error("witness check failed: {0}")]
    WitnessViolation(String),

    #[error("certification failed at the precision cap of {bits} bits: {reason}")]
    Precision { bits: u32, reason: String },

    #[error("{0}")]
    Invalid(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
