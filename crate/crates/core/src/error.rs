use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("security mode of key and ciphertext do not match")]
    ModeMismatch,
    #[error("value at index {index} violates the bound {bound}")]
    BoundViolation { index: usize, bound: String },
    #[error("discrete logarithm not found in [{lower}, {upper}]")]
    DlogNotFound { lower: i64, upper: i64 },
    #[error("noise overflow: decoded value is not within the expected range")]
    NoiseOverflow,
    #[error("parameter at index {0} is not finite")]
    NonFinite(usize),
    #[error("no ciphertext for slot {0}")]
    MissingSlot(u32),
    #[error("ciphertext for unknown or duplicate slot {0}")]
    UnexpectedSlot(u32),
    #[error("at least {required} clients are required, got {got}")]
    TooFewClients { required: usize, got: usize },
    #[error("no client trained in this round")]
    NoTrainers,
    #[error("malformed encoding: {0}")]
    Malformed(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
