use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A certified comparison or floor could not be decided at the working precision.
    #[error("precision exhausted at {prec} bits")]
    PrecisionExhausted { prec: u32 },

    #[error("negative radicand")]
    NegativeRadicand,

    #[error("division by zero")]
    DivisionByZero,

    /// An orbit coordinate hit an (m,k)-rational point or left the space of dynamic pairs.
    #[error("degenerate orbit: {0}")]
    DegenerateOrbit(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("seed is (m,k)-rational: expansion terminated after {digits} digits")]
    RationalSeed { digits: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("value out of domain: {0}")]
    OutOfDomain(String),

    #[error("digit does not fit in 64 bits")]
    DigitOverflow,

    #[error("cannot parse {0:?}")]
    Parse(String),
}

impl Error {
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::PrecisionExhausted { .. })
    }
}
