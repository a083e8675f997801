//! The invertible system on Ω = [0,1) × (−∞, m−k]: membership, 𝒯, 𝒯⁻¹,
//! digit bi-sequences and reflected pasts.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::expansion::{apply_map, branch, digit_scalar, evaluate_finite, remainder, to_digit, DigitStream, Params};
use crate::numerics::Scalar;

/// A point of Ω.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicPair {
    params: Params,
    x: Scalar,
    y: Scalar,
}

/// `x ∈ [0,1)` and `y ≤ m − k`, decided exactly or by certified comparison.
pub fn omega_contains(p: &Params, x: &Scalar, y: &Scalar) -> Result<bool> {
    if x.signum()? == Ordering::Less || x.compare(&Scalar::from(1))? != Ordering::Less {
        return Ok(false);
    }
    Ok(y.compare(&p.y_top())? != Ordering::Greater)
}

impl DynamicPair {
    pub fn new(p: &Params, x: Scalar, y: Scalar) -> Result<DynamicPair> {
        if !omega_contains(p, &x, &y)? {
            return Err(Error::OutOfDomain(format!("({x}, {y}) is not in Ω for {p}")));
        }
        Ok(DynamicPair::unchecked(p, x, y))
    }

    pub(crate) fn unchecked(p: &Params, x: Scalar, y: Scalar) -> DynamicPair {
        DynamicPair {
            params: p.clone(),
            x,
            y,
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn x(&self) -> &Scalar {
        &self.x
    }

    pub fn y(&self) -> &Scalar {
        &self.y
    }

    pub fn is_exact(&self) -> bool {
        self.x.is_exact() && self.y.is_exact()
    }

    /// `𝒯(x, y) = (A(x) − a, A(y) − a)` with `a = ⌊A(x)⌋`.
    pub fn step(&self) -> Result<(DynamicPair, u64)> {
        if self.x.is_zero_exact() {
            return Err(Error::DegenerateOrbit("x = 0 has no forward image".into()));
        }
        let p = &self.params;
        let (x, a) = apply_map(p, &self.x)?;
        let y = remainder(p, &self.y)?.sub(&digit_scalar(a));
        if y.compare(&p.y_top())? == Ordering::Greater {
            return Err(Error::DegenerateOrbit(format!("image y = {y} left Ω")));
        }
        Ok((DynamicPair::unchecked(p, x, y), a))
    }

    /// `𝒯⁻¹` along digit `a`: `(h_a(x), h_a(y))`, rejected when the result is not in Ω.
    pub fn step_back(&self, a: u64) -> Result<DynamicPair> {
        let p = &self.params;
        let x = branch(p, a, &self.x)?;
        let y = branch(p, a, &self.y)?;
        if !omega_contains(p, &x, &y)? {
            return Err(Error::DegenerateOrbit(format!(
                "digit {a} is not realisable: preimage ({x}, {y}) is not in Ω"
            )));
        }
        Ok(DynamicPair::unchecked(p, x, y))
    }

    /// The y-side anchor `a_0`, the integer with `m − k − a_0 − y ∈ (0,1)`; `None` when
    /// `m − k − y` is an integer.
    pub fn anchor_digit(&self) -> Result<Option<u64>> {
        let z = self.params.y_top().sub(&self.y);
        let f = z.floor_certified()?;
        if z.compare(&Scalar::from(f.clone()))? == Ordering::Equal {
            return Ok(None);
        }
        to_digit(&f).map(Some)
    }

    /// Digits `a_{−N} … a_N` around the current time.
    pub fn bi_digits(&self, radius: usize) -> Result<BiDigits> {
        let p = &self.params;
        let forward = take_digits(p, self.x.clone(), radius, "x")?;
        let a0 = self
            .anchor_digit()?
            .ok_or_else(|| Error::DegenerateOrbit("m − k − y is an integer".into()))?;
        let w = p.y_top().sub(&digit_scalar(a0)).sub(&self.y);
        let backward = take_digits(p, w, radius, "y")?;
        Ok(BiDigits {
            anchor: a0,
            forward,
            backward,
        })
    }

    /// Forward orbit: `(pair_n, a_n)` for `n = 1, 2, …`; ends after an exact `x = 0`.
    pub fn orbit(&self) -> Orbit {
        Orbit {
            cur: Some(self.clone()),
        }
    }
}

fn take_digits(p: &Params, seed: Scalar, n: usize, side: &str) -> Result<Vec<u64>> {
    let digits: Vec<u64> = DigitStream::new(p, seed).take(n).collect::<Result<_>>()?;
    if digits.len() < n {
        return Err(Error::DegenerateOrbit(format!(
            "{side}-side expansion terminates after {} digits",
            digits.len()
        )));
    }
    Ok(digits)
}

pub struct Orbit {
    cur: Option<DynamicPair>,
}

impl Iterator for Orbit {
    type Item = Result<(DynamicPair, u64)>;

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.cur.take()?;
        if cur.x().is_zero_exact() {
            return None;
        }
        match cur.step() {
            Ok((next, a)) => {
                self.cur = Some(next.clone());
                Some(Ok((next, a)))
            }
            Err(e) => Some(Err(e)),
        }
    }
}

/// Finite window of the digit bi-sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiDigits {
    pub anchor: u64,
    /// `a_1 … a_N`
    pub forward: Vec<u64>,
    /// `a_{−1} … a_{−N}`
    pub backward: Vec<u64>,
}

impl BiDigits {
    pub fn radius(&self) -> usize {
        self.forward.len()
    }

    pub fn get(&self, n: i64) -> Option<u64> {
        match n.cmp(&0) {
            Ordering::Equal => Some(self.anchor),
            Ordering::Greater => self.forward.get(n as usize - 1).copied(),
            Ordering::Less => self.backward.get((-n) as usize - 1).copied(),
        }
    }

    /// `a_{−N} … a_N` in index order.
    pub fn to_vec(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.backward.iter().rev().copied().collect();
        v.push(self.anchor);
        v.extend(&self.forward);
        v
    }
}

/// `y_0 = m − k − a_1 − [a_2, …, a_D]`, the depth-D reflection of `[a_1, a_2, …]`.
pub fn reflect(p: &Params, digits: &[u64]) -> Result<Scalar> {
    if digits.len() < 2 {
        return Err(Error::InvalidParams("reflection needs at least two digits".into()));
    }
    let tail = evaluate_finite(p, &digits[1..])?;
    Ok(p.y_top().sub(&digit_scalar(digits[0])).sub(&tail))
}

/// One-sided start `(x_1, Y_1) = (T x_0, m − k − a_1)`.
pub fn one_sided_start(p: &Params, x0: &Scalar) -> Result<(DynamicPair, u64)> {
    let (x1, a1) = apply_map(p, x0)?;
    let y1 = p.y_top().sub(&digit_scalar(a1));
    Ok((DynamicPair::unchecked(p, x1, y1), a1))
}
