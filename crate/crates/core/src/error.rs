use thiserror::Error;

/// Errors raised by the toolkit's constructors and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("phase must have unit modulus, got |z| = {modulus}")]
    NonUnitModulus { modulus: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("unsupported operator dimension {0}")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("Kraus operators are not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("operators do not form a POVM: {0}")]
    NotPovm(String),

    #[error("{name} = {value} is outside {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("length mismatch: expected {expected} bits, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("hash lengths need 0 < out_len <= in_len, got in {in_len}, out {out_len}")]
    InvalidHashLengths { in_len: usize, out_len: usize },

    #[error("invalid protocol parameters: {0}")]
    InvalidParams(String),

    #[error("no sign change of the rate curve in the search interval")]
    NoSignChange,

    #[error("transcript is missing outcomes for sample pulse {0}")]
    MissingOutcomes(usize),

    #[error("strategy supplies {supplied} pulses but the protocol needs {needed}")]
    StrategyTooShort { supplied: usize, needed: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
