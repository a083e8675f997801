//! Adaptive precision: start at the configured width, double on exhaustion.

use crate::error::{Error, Result};
use crate::{DEFAULT_PREC, MAX_PREC};

pub const PRECISION_ENV: &str = "MKCF_PRECISION";

/// Starting precision: `MKCF_PRECISION` when set to a valid width, else the default.
pub fn start_prec() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|p| (64..=MAX_PREC).contains(p))
        .unwrap_or(DEFAULT_PREC)
}

/// Run `f` at `start`, doubling the precision after each [`Error::PrecisionExhausted`]
/// until [`MAX_PREC`] has been tried.
pub fn with_retry<T>(start: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut prec = start.clamp(64, MAX_PREC);
    loop {
        match f(prec) {
            Err(Error::PrecisionExhausted { .. }) if prec < MAX_PREC => {
                prec = (prec * 2).min(MAX_PREC);
            }
            other => return other,
        }
    }
}
