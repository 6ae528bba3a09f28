use thiserror::Error;

use crate::families::Family;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field GF({p}^{k}) is outside the supported range (k >= 1, q <= 2^20)")]
    FieldOutOfRange { p: u64, k: u32 },
    #[error("encoding {value} is not an element of GF({q})")]
    InvalidEncoding { value: u64, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("operation is not available in characteristic {0}")]
    UnsupportedCharacteristic(u32),
    #[error("{family} curves are not defined over fields of characteristic {p}")]
    IncompatibleFamily { family: Family, p: u32 },
    #[error("invalid curve parameters: {0}")]
    InvalidParameters(String),
    #[error("singular Weierstrass equation (zero discriminant)")]
    Singular,
    #[error("rational function evaluated at a pole")]
    Pole,
    #[error("q = {q} exceeds the resource guard of {limit} for {what}")]
    GuardExceeded { what: &'static str, q: u32, limit: u32 },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
