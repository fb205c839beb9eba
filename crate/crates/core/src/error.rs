use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid level ({n},{p}): {reason}")]
    InvalidLevel { n: u64, p: u64, reason: &'static str },
    #[error("invalid discriminant {0}: need D < 0 and D ≡ 0,1 (mod 4)")]
    InvalidDiscriminant(i64),
    #[error("{n} is not a square mod {p}")]
    NotASquare { n: u64, p: u64 },
    #[error("singular matrix mod {p}")]
    SingularMatrix { p: u64 },
    #[error("matrices over different characteristics ({0} and {1})")]
    MixedCharacteristic(u64, u64),
    #[error("operation requires a {expected} level, got {level}")]
    WrongCase { level: String, expected: &'static str },
    #[error("invalid Atkin-Lehner pair (M={m}, Q={q}): {reason}")]
    InvalidAtkinLehner { m: u64, q: u64, reason: &'static str },
    #[error("inconsistent ramification data: {0}")]
    Ramification(String),
    #[error("model is invalid: {}", .0.join("; "))]
    InvalidModel(Vec<String>),
    #[error("model file: {0}")]
    Parse(String),
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("determinant parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
