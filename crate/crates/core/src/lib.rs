//! Exact and certified computation with (m,k)-continued fractions, their natural
//! extensions and bi-sequences of approximation coefficients.

pub mod approx;
pub mod error;
pub mod expansion;
pub mod natural_extension;
pub mod numerics;
pub mod parallel;
pub mod precision;
pub mod sampling;
pub mod spectra;
pub mod suites;

pub use error::{Error, Result};
pub use expansion::Params;
pub use numerics::{parse_scalar, CertReal, QuadraticSurd, Rational, Scalar};

/// Working precision in bits for certified values.
pub const DEFAULT_PREC: u32 = 256;
/// Precision ceiling for the doubling retry policy.
pub const MAX_PREC: u32 = 8192;
