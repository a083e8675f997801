//! Reproducible random seeds: one ChaCha stream per seed index.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::expansion::Params;
use crate::natural_extension::DynamicPair;
use crate::numerics::{CertReal, Rational, Scalar};

/// Independent generator for task `index` under master seed `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform dyadic `P/2^bits` in `(0,1)`.
pub fn random_dyadic(rng: &mut impl RngCore, bits: u32) -> Rational {
    loop {
        let words = bits.div_ceil(32) as usize;
        let limbs: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
        let mut p = BigInt::from_slice(Sign::Plus, &limbs);
        let extra = words as u32 * 32 - bits;
        p >>= extra as usize;
        if !p.is_zero() {
            return Rational::new(p, BigInt::one() << bits as usize).expect("non-zero denominator");
        }
    }
}

/// Rational in `(0,1)` with denominator at most `max_den`.
pub fn random_small_rational(rng: &mut impl Rng, max_den: u64) -> Rational {
    let q = rng.random_range(2..=max_den.max(2));
    let p = rng.random_range(1..q);
    Rational::new(p, q).expect("non-zero denominator")
}

/// The exact ingredients of a random point of Ω: `x`, and `y = m − k − a_0 − z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedPair {
    pub x: Rational,
    pub a0: u64,
    pub z: Rational,
}

impl SeedPair {
    /// Dyadic coordinates with `bits` random bits each.
    pub fn dyadic(rng: &mut impl Rng, bits: u32) -> SeedPair {
        let x = random_dyadic(rng, bits);
        let a0 = rng.random_range(0..4);
        let z = random_dyadic(rng, bits);
        SeedPair { x, a0, z }
    }

    /// Coordinates with bounded denominators, for exact-arithmetic checks.
    pub fn small(rng: &mut impl Rng, max_den: u64) -> SeedPair {
        let x = random_small_rational(rng, max_den);
        let a0 = rng.random_range(0..4);
        let z = random_small_rational(rng, max_den);
        SeedPair { x, a0, z }
    }

    fn y_exact(&self, p: &Params) -> Scalar {
        p.y_top()
            .sub(&Scalar::from(self.a0 as i64))
            .sub(&Scalar::Rational(self.z.clone()))
    }

    /// Both coordinates exact.
    pub fn exact(&self, p: &Params) -> Result<DynamicPair> {
        DynamicPair::new(p, Scalar::Rational(self.x.clone()), self.y_exact(p))
    }

    /// Exact `x`, certified `y` at `prec` bits.
    pub fn hybrid(&self, p: &Params, prec: u32) -> Result<DynamicPair> {
        let y = Scalar::Real(self.y_exact(p).to_cert(prec));
        DynamicPair::new(p, Scalar::Rational(self.x.clone()), y)
    }

    /// Both coordinates certified at `prec` bits.
    pub fn certified(&self, p: &Params, prec: u32) -> Result<DynamicPair> {
        let x = Scalar::Real(CertReal::from_rational(self.x.as_big(), prec));
        let y = Scalar::Real(self.y_exact(p).to_cert(prec));
        DynamicPair::new(p, x, y)
    }
}
