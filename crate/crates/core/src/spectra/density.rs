//! Invariant density of the one-sided map and Birkhoff digit frequencies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::{cylinder_interval, DigitStream, Params};
use crate::numerics::{CertReal, Scalar};
use crate::DEFAULT_PREC;

/// Digits tracked individually; larger ones share the last bucket.
pub const TRACKED_DIGITS: usize = 10;

fn shift(p: &Params) -> Scalar {
    p.k().sub(&p.m_scalar())
}

fn log_norm(p: &Params, prec: u32) -> Result<CertReal> {
    let s = shift(p);
    if s.is_zero_exact() {
        return Err(Error::DegenerateInput(format!(
            "{p}: the invariant measure is infinite"
        )));
    }
    s.add_int(1).div(&s)?.to_cert(prec).ln()
}

/// `μ(x) = 1 / ((x + k − m) · ln((k + 1 − m)/(k − m)))`.
pub fn density_mu(p: &Params, x: &Scalar) -> Result<Scalar> {
    let prec = x.prec().unwrap_or(DEFAULT_PREC);
    let norm = log_norm(p, prec)?;
    let base = x.add(&shift(p)).to_cert(prec);
    Ok(Scalar::Real(base.mul(&norm).recip()?))
}

/// `μ` of the cylinder of digit `a`.
pub fn model_digit_probability(p: &Params, a: u64) -> Result<Scalar> {
    let prec = DEFAULT_PREC;
    let norm = log_norm(p, prec)?;
    let (lo, hi) = cylinder_interval(p, &[a])?;
    let s = shift(p);
    let ratio = hi.add(&s).div(&lo.add(&s))?;
    Ok(Scalar::Real(ratio.to_cert(prec).ln()?.div(&norm)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DigitFrequency {
    /// Digit, or the first digit of the overflow bucket.
    pub digit: u64,
    pub overflow: bool,
    pub count: u64,
    pub empirical: f64,
    pub model: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DigitStats {
    pub params: String,
    pub n: usize,
    pub table: Vec<DigitFrequency>,
    /// Set when the model comparison is unavailable.
    pub note: Option<String>,
}

impl DigitStats {
    pub fn empirical(&self, a: u64) -> Option<f64> {
        self.table
            .iter()
            .find(|f| f.digit == a && !f.overflow)
            .map(|f| f.empirical)
    }

    pub fn model(&self, a: u64) -> Option<f64> {
        self.table
            .iter()
            .find(|f| f.digit == a && !f.overflow)
            .and_then(|f| f.model)
    }
}

/// Frequencies of the first `n` digits of `seed` against the model law.
pub fn birkhoff_digit_stats(p: &Params, seed: &Scalar, n: usize) -> Result<DigitStats> {
    let mut counts = [0u64; TRACKED_DIGITS + 1];
    let mut seen = 0usize;
    for a in DigitStream::new(p, seed.clone()).take(n) {
        counts[(a? as usize).min(TRACKED_DIGITS)] += 1;
        seen += 1;
    }
    if seen < n {
        return Err(Error::RationalSeed { digits: seen });
    }
    let mut note = None;
    let mut table = Vec::with_capacity(TRACKED_DIGITS + 1);
    for (d, &count) in counts.iter().enumerate() {
        let overflow = d == TRACKED_DIGITS;
        let model = if overflow || note.is_some() {
            None
        } else {
            match model_digit_probability(p, d as u64) {
                Ok(v) => Some(v.to_f64()),
                Err(Error::DegenerateInput(msg)) => {
                    note = Some(msg);
                    None
                }
                Err(e) => return Err(e),
            }
        };
        table.push(DigitFrequency {
            digit: d as u64,
            overflow,
            count,
            empirical: count as f64 / n.max(1) as f64,
            model,
        });
    }
    if note.is_none() {
        let tracked: f64 = table.iter().filter_map(|f| f.model).sum();
        table[TRACKED_DIGITS].model = Some((1.0 - tracked).max(0.0));
    }
    Ok(DigitStats {
        params: p.to_string(),
        n,
        table,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_dyadic, rng_for};

    #[test]
    fn gauss_digit_zero() {
        let p = Params::rational(0, 1, 1);
        let v = model_digit_probability(&p, 0).unwrap().to_f64();
        assert!((v - (4.0f64 / 3.0).log2()).abs() < 1e-15);
    }

    #[test]
    fn density_at_zero() {
        let p = Params::rational(0, 1, 1);
        let v = density_mu(&p, &Scalar::zero()).unwrap().to_f64();
        assert!((v - 1.0 / std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn degenerate_when_shift_vanishes() {
        let p = Params::rational(1, 1, 1);
        assert!(matches!(
            density_mu(&p, &Scalar::zero()),
            Err(Error::DegenerateInput(_))
        ));
        let seed = Scalar::Rational(random_dyadic(&mut rng_for(1, 0), 512));
        let s = birkhoff_digit_stats(&p, &seed, 50).unwrap();
        assert!(s.note.is_some());
        assert!(s.table.iter().all(|f| f.model.is_none()));
    }

    #[test]
    fn model_probabilities_sum_to_one() {
        for p in [
            Params::rational(0, 1, 1),
            Params::rational(1, 2, 1),
            Params::rational(0, 3, 2),
        ] {
            let total: f64 = (0..2000)
                .map(|a| model_digit_probability(&p, a).unwrap().to_f64())
                .sum();
            assert!((total - 1.0).abs() < 2e-3, "{p}: {total}");
        }
    }
}
