//! One-sided (m,k)-expansions: the interval map, digits, finite evaluation,
//! convergents, pasts and cylinder sets.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{QuadraticSurd, Rational, Scalar};

#[derive(Debug)]
struct ParamsInner {
    m: u8,
    k: Scalar,
    // k = s/t in lowest terms
    frac: Option<(BigInt, BigInt)>,
}

/// The pair `(m, k)`: `m = 0` Gauss-like, `m = 1` Renyi-like, `k ≥ 1`.
#[derive(Clone, Debug)]
pub struct Params(Arc<ParamsInner>);

impl Params {
    pub fn new(m: u8, k: Scalar) -> Result<Params> {
        if m > 1 {
            return Err(Error::InvalidParams(format!("m must be 0 or 1, got {m}")));
        }
        if k.compare(&Scalar::from(1))? == Ordering::Less {
            return Err(Error::InvalidParams(format!("k must be at least 1, got {k}")));
        }
        let frac = k.as_rational().map(|r| (r.num().clone(), r.den().clone()));
        Ok(Params(Arc::new(ParamsInner { m, k, frac })))
    }

    /// Rational `k = p/q`; panics on invalid input, for tests and tables.
    pub fn rational(m: u8, p: i64, q: i64) -> Params {
        Params::new(m, Scalar::ratio(p, q).expect("non-zero denominator")).expect("valid parameters")
    }

    pub fn m(&self) -> u8 {
        self.0.m
    }

    pub fn k(&self) -> &Scalar {
        &self.0.k
    }

    pub(crate) fn frac(&self) -> Option<(&BigInt, &BigInt)> {
        self.0.frac.as_ref().map(|(s, t)| (s, t))
    }

    pub fn k_is_integer(&self) -> bool {
        self.frac().is_some_and(|(_, t)| t.is_one())
    }

    pub fn m_scalar(&self) -> Scalar {
        Scalar::from(self.0.m as i64)
    }

    /// `1 − 2m`.
    pub fn sign(&self) -> i64 {
        1 - 2 * self.0.m as i64
    }

    /// `m − k`, the upper end of the y-range of Ω.
    pub fn y_top(&self) -> Scalar {
        self.m_scalar().sub(self.k())
    }
}

impl Eq for Params {}

impl PartialEq for Params {
    fn eq(&self, o: &Params) -> bool {
        self.m() == o.m() && self.k() == o.k()
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, k={})", self.m(), self.k())
    }
}

pub(crate) fn to_digit(n: &BigInt) -> Result<u64> {
    if n.is_negative() {
        return Err(Error::DegenerateOrbit(format!("negative digit {n}")));
    }
    n.to_u64().ok_or(Error::DigitOverflow)
}

pub(crate) fn digit_scalar(a: u64) -> Scalar {
    Scalar::from(BigInt::from(a))
}

/// `A(x) = k(1 − m − x)/(x − m)`.
pub fn remainder(p: &Params, x: &Scalar) -> Result<Scalar> {
    let m = p.m_scalar();
    let num = p.k().mul(&Scalar::from(1).sub(&m).sub(x));
    num.div(&x.sub(&m)).map_err(|e| match e {
        Error::DivisionByZero => Error::DegenerateOrbit(format!("A is singular at x = {x}")),
        e => e,
    })
}

/// Inverse branch `h_a(x) = m + k(1 − 2m)/(a + k + x)`.
pub fn branch(p: &Params, a: u64, x: &Scalar) -> Result<Scalar> {
    let den = digit_scalar(a).add(p.k()).add(x);
    let step = p.k().mul_int(p.sign()).div(&den).map_err(|e| match e {
        Error::DivisionByZero => Error::DegenerateOrbit(format!("branch {a} is singular at {x}")),
        e => e,
    })?;
    Ok(p.m_scalar().add(&step))
}

fn check_unit(x: &Scalar) -> Result<()> {
    if x.is_exact() && (x.signum()? == Ordering::Less || x.compare(&Scalar::from(1))? != Ordering::Less) {
        return Err(Error::OutOfDomain(format!("{x} is outside [0,1)")));
    }
    Ok(())
}

/// One step of `T` on an exact rational with rational `k`, without a full gcd.
pub(crate) fn step_rational(p: &Params, x: &Rational) -> Result<(Rational, u64)> {
    let (s, t) = p.frac().expect("rational k");
    let (xp, xq) = (x.num(), x.den());
    if xp.is_zero() {
        return Ok((Rational::zero(), 0));
    }
    let (n, d) = if p.m() == 0 {
        (s * (xq - xp), t * xp)
    } else {
        (s * xp, t * (xq - xp))
    };
    if d.is_zero() {
        return Err(Error::DegenerateOrbit(format!("A is singular at x = {x}")));
    }
    let (a, rem) = n.div_mod_floor(&d);
    let a = to_digit(&a)?;
    if rem.is_zero() {
        return Ok((Rational::zero(), a));
    }
    let st = s * t;
    let (mut rem, mut d) = (rem, d);
    if !st.is_one() {
        let g = st.gcd(&rem.mod_floor(&st)).gcd(&d.mod_floor(&st));
        if !g.is_one() {
            rem /= &g;
            d /= &g;
        }
    }
    Ok((Rational(num_rational::BigRational::new_raw(rem, d)), a))
}

/// `T(x)` and the digit `a = ⌊A(x)⌋`; `T(0) = 0` with digit 0 by convention.
pub fn apply_map(p: &Params, x: &Scalar) -> Result<(Scalar, u64)> {
    if x.is_zero_exact() {
        return Ok((Scalar::zero(), 0));
    }
    check_unit(x)?;
    if let (Scalar::Rational(r), Some(_)) = (x, p.frac()) {
        let (y, a) = step_rational(p, r)?;
        return Ok((Scalar::Rational(y), a));
    }
    let r = remainder(p, x)?;
    let a = to_digit(&r.floor_certified()?)?;
    Ok((r.sub(&digit_scalar(a)), a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    /// Some `x_N = 0`.
    TerminatedRational {
        rank: usize,
    },
    Truncated {
        max_steps: usize,
    },
    /// `x_{pre+len} = x_pre`.
    Periodic {
        preperiod: usize,
        period: usize,
    },
}

#[derive(Clone, Debug)]
pub struct Expansion {
    pub params: Params,
    /// `a_1, a_2, …`
    pub digits: Vec<u64>,
    /// `x_0, x_1, …`
    pub futures: Vec<Scalar>,
    /// `r_1, r_2, …`
    pub remainders: Vec<Scalar>,
    pub status: Status,
}

#[derive(Hash, PartialEq, Eq)]
enum StateKey {
    Rational(Rational),
    Surd(QuadraticSurd),
}

fn state_key(x: &Scalar) -> Option<StateKey> {
    match x {
        Scalar::Rational(r) => Some(StateKey::Rational(r.clone())),
        Scalar::Surd(s) => Some(StateKey::Surd(s.clone())),
        Scalar::Real(_) => None,
    }
}

/// Expand `seed` until it terminates, revisits an exact state, or hits `max_steps`.
pub fn expand(p: &Params, seed: &Scalar, max_steps: usize) -> Result<Expansion> {
    check_unit(seed)?;
    let mut out = Expansion {
        params: p.clone(),
        digits: Vec::new(),
        futures: vec![seed.clone()],
        remainders: Vec::new(),
        status: Status::Truncated { max_steps },
    };
    if seed.is_zero_exact() {
        out.status = Status::TerminatedRational { rank: 0 };
        return Ok(out);
    }
    // rational seeds with integer k always terminate
    let track = !(matches!(seed, Scalar::Rational(_)) && p.k_is_integer());
    let mut seen: HashMap<StateKey, usize> = HashMap::new();
    if track {
        if let Some(key) = state_key(seed) {
            seen.insert(key, 0);
        }
    }
    for n in 1..=max_steps {
        let x = &out.futures[n - 1];
        let r = match x {
            Scalar::Rational(_) if p.frac().is_some() => None,
            _ => Some(remainder(p, x)?),
        };
        let (next, a) = apply_map(p, x)?;
        let r = match r {
            Some(r) => r,
            None => next.add(&digit_scalar(a)),
        };
        out.digits.push(a);
        out.remainders.push(r);
        out.futures.push(next);
        let next = &out.futures[n];
        if next.is_zero_exact() {
            out.status = Status::TerminatedRational { rank: n };
            return Ok(out);
        }
        if track {
            if let Some(key) = state_key(next) {
                if let Some(&i) = seen.get(&key) {
                    out.status = Status::Periodic {
                        preperiod: i,
                        period: n - i,
                    };
                    return Ok(out);
                }
                seen.insert(key, n);
            }
        }
    }
    Ok(out)
}

/// Lazy digit sequence of a seed; ends after an exact zero.
pub struct DigitStream {
    params: Params,
    x: Scalar,
    done: bool,
}

impl DigitStream {
    pub fn new(p: &Params, seed: Scalar) -> DigitStream {
        DigitStream {
            params: p.clone(),
            done: seed.is_zero_exact(),
            x: seed,
        }
    }

    /// Current future `x_n`.
    pub fn state(&self) -> &Scalar {
        &self.x
    }
}

impl Iterator for DigitStream {
    type Item = Result<u64>;

    fn next(&mut self) -> Option<Result<u64>> {
        if self.done {
            return None;
        }
        match apply_map(&self.params, &self.x) {
            Ok((x, a)) => {
                self.done = x.is_zero_exact();
                self.x = x;
                Some(Ok(a))
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// `h_{a_1} ∘ … ∘ h_{a_N}(tail)`.
pub fn evaluate_with_tail(p: &Params, digits: &[u64], tail: &Scalar) -> Result<Scalar> {
    if let (Some((s, t)), Scalar::Rational(x)) = (p.frac(), tail) {
        // projective fold with integer coefficients; one reduction at the end
        let m = BigInt::from(p.m());
        let sign = BigInt::from(p.sign());
        let (mut num, mut den) = (x.num().clone(), x.den().clone());
        for &a in digits.iter().rev() {
            let at_s = BigInt::from(a) * t + s;
            let n2 = &m * t * &num + (&m * &at_s + s * &sign) * &den;
            let d2 = t * &num + &at_s * &den;
            num = n2;
            den = d2;
        }
        return Ok(Scalar::Rational(Rational::new(num, den)?));
    }
    let mut x = tail.clone();
    for &a in digits.iter().rev() {
        x = branch(p, a, &x)?;
    }
    Ok(x)
}

/// `[a_1, …, a_N]_{(m,k)}`; the empty list evaluates to 0.
pub fn evaluate_finite(p: &Params, digits: &[u64]) -> Result<Scalar> {
    evaluate_with_tail(p, digits, &Scalar::zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub index: usize,
    pub p: Scalar,
    pub q: Scalar,
}

impl Convergent {
    pub fn value(&self) -> Result<Scalar> {
        self.p.div(&self.q)
    }
}

/// `p_n/q_n` for `n = 0..=N` from products of branch matrices applied to 0.
///
/// For rational `k = s/t` each branch is scaled by `t`, so the entries are integers.
pub fn convergents(p: &Params, digits: &[u64]) -> Result<Vec<Convergent>> {
    let mut out = Vec::with_capacity(digits.len() + 1);
    out.push(Convergent {
        index: 0,
        p: Scalar::zero(),
        q: Scalar::from(1),
    });
    if let Some((s, t)) = p.frac() {
        let m = BigInt::from(p.m());
        let sign = BigInt::from(p.sign());
        // row-major [[a, b], [c, d]]
        let mut mat = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()];
        for (i, &a) in digits.iter().enumerate() {
            let at_s = BigInt::from(a) * t + s;
            let br = [&m * t, &m * &at_s + s * &sign, t.clone(), at_s];
            mat = [
                &mat[0] * &br[0] + &mat[1] * &br[2],
                &mat[0] * &br[1] + &mat[1] * &br[3],
                &mat[2] * &br[0] + &mat[3] * &br[2],
                &mat[2] * &br[1] + &mat[3] * &br[3],
            ];
            out.push(Convergent {
                index: i + 1,
                p: Scalar::from(mat[1].clone()),
                q: Scalar::from(mat[3].clone()),
            });
        }
        return Ok(out);
    }
    let m = p.m_scalar();
    let k = p.k();
    let mut mat = [Scalar::from(1), Scalar::zero(), Scalar::zero(), Scalar::from(1)];
    for (i, &a) in digits.iter().enumerate() {
        let ak = digit_scalar(a).add(k);
        let br = [m.clone(), m.mul(&ak).add(&k.mul_int(p.sign())), Scalar::from(1), ak];
        mat = [
            mat[0].mul(&br[0]).add(&mat[1].mul(&br[2])),
            mat[0].mul(&br[1]).add(&mat[1].mul(&br[3])),
            mat[2].mul(&br[0]).add(&mat[3].mul(&br[2])),
            mat[2].mul(&br[1]).add(&mat[3].mul(&br[3])),
        ];
        out.push(Convergent {
            index: i + 1,
            p: mat[1].clone(),
            q: mat[3].clone(),
        });
    }
    Ok(out)
}

/// The past `Y_n` of a digit prefix `a_1..a_n`.
pub fn past(p: &Params, digits: &[u64]) -> Result<Scalar> {
    let top = p.y_top();
    let Some((&last, prefix)) = digits.split_last() else {
        return Ok(top);
    };
    let rev: Vec<u64> = prefix.iter().rev().copied().collect();
    let tail = evaluate_finite(p, &rev)?;
    Ok(top.sub(&digit_scalar(last)).sub(&tail))
}

/// Closure endpoints `(lo, hi)` of the cylinder of a digit prefix.
pub fn cylinder_interval(p: &Params, digits: &[u64]) -> Result<(Scalar, Scalar)> {
    let e0 = evaluate_with_tail(p, digits, &Scalar::zero())?;
    let e1 = evaluate_with_tail(p, digits, &Scalar::from(1))?;
    Ok(match e0.compare(&e1)? {
        Ordering::Greater => (e1, e0),
        _ => (e0, e1),
    })
}
