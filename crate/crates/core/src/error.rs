use thiserror::Error;

use crate::series::Modulus;

/// Errors raised by the series, eta-quotient, operator and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} out of range (expected 2 <= M <= 2^31)")]
    InvalidModulus(u64),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: Modulus, right: Modulus },

    #[error("constant term {constant} is not a unit modulo {modulus}")]
    NonUnitConstant { constant: String, modulus: Modulus },

    #[error("leading exponent {numerator}/24 is not an integer")]
    FractionalLeadingExponent { numerator: i64 },

    #[error("weight {numerator}/2 is half-integral")]
    HalfIntegralWeight { numerator: i64 },

    #[error("eta-quotient is not admissible: {0}")]
    NotAdmissible(String),

    #[error("{divisor} does not divide {level}")]
    NotADivisor { divisor: u64, level: u64 },

    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("insufficient truncation: need {required} coefficients, have {available}")]
    InsufficientTruncation { required: usize, available: usize },

    #[error("enumeration guard: n = {n} exceeds the oracle limit {limit}")]
    EnumerationTooLarge { n: u64, limit: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }
}
