use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::Rational;
use super::real::CertReal;
use crate::error::{Error, Result};

/// `a + b·√d` with `d > 1` squarefree and `b != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    a: Rational,
    b: Rational,
    d: BigInt,
}

/// Result of field arithmetic on surds sharing `d`: collapses to a rational when `b = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurdOrRational {
    Surd(QuadraticSurd),
    Rational(Rational),
}

impl QuadraticSurd {
    /// `d` must already be squarefree and greater than one.
    pub fn new(a: Rational, b: Rational, d: BigInt) -> Result<SurdOrRational> {
        if d <= BigInt::one() {
            return Err(Error::InvalidParams(format!("surd radicand {d} must exceed 1")));
        }
        if !is_squarefree_small(&d) {
            return Err(Error::InvalidParams(format!("surd radicand {d} is not squarefree")));
        }
        Ok(QuadraticSurd::raw(a, b, d))
    }

    pub(crate) fn raw(a: Rational, b: Rational, d: BigInt) -> SurdOrRational {
        if b.is_zero() {
            SurdOrRational::Rational(a)
        } else {
            SurdOrRational::Surd(QuadraticSurd { a, b, d })
        }
    }

    /// A rational viewed in `ℚ(√d)`; only for use as an arithmetic operand.
    pub(crate) fn operand(a: Rational, d: BigInt) -> QuadraticSurd {
        QuadraticSurd {
            a,
            b: Rational::zero(),
            d,
        }
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn conj(&self) -> QuadraticSurd {
        QuadraticSurd {
            b: -&self.b,
            ..self.clone()
        }
    }

    /// `a² − b²d`, never zero.
    pub fn norm(&self) -> Rational {
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &Rational::from_int(self.d.clone()))
    }

    pub fn add(&self, o: &QuadraticSurd) -> SurdOrRational {
        debug_assert_eq!(self.d, o.d);
        QuadraticSurd::raw(&self.a + &o.a, &self.b + &o.b, self.d.clone())
    }

    pub fn sub(&self, o: &QuadraticSurd) -> SurdOrRational {
        debug_assert_eq!(self.d, o.d);
        QuadraticSurd::raw(&self.a - &o.a, &self.b - &o.b, self.d.clone())
    }

    pub fn mul(&self, o: &QuadraticSurd) -> SurdOrRational {
        debug_assert_eq!(self.d, o.d);
        let d = Rational::from_int(self.d.clone());
        let a = &(&self.a * &o.a) + &(&(&self.b * &o.b) * &d);
        let b = &(&self.a * &o.b) + &(&self.b * &o.a);
        QuadraticSurd::raw(a, b, self.d.clone())
    }

    pub fn add_rational(&self, r: &Rational) -> QuadraticSurd {
        QuadraticSurd {
            a: &self.a + r,
            ..self.clone()
        }
    }

    pub fn mul_rational(&self, r: &Rational) -> SurdOrRational {
        QuadraticSurd::raw(&self.a * r, &self.b * r, self.d.clone())
    }

    pub fn neg(&self) -> QuadraticSurd {
        QuadraticSurd {
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    pub fn recip(&self) -> QuadraticSurd {
        let n = self.norm();
        QuadraticSurd {
            a: self.a.checked_div(&n).expect("surd norm is non-zero"),
            b: (-&self.b).checked_div(&n).expect("surd norm is non-zero"),
            d: self.d.clone(),
        }
    }

    /// Exact sign; a surd is never zero.
    pub fn signum(&self) -> Ordering {
        sign_of(&self.a, &self.b, &self.d)
    }

    pub fn floor(&self) -> BigInt {
        let mut prec = 64;
        loop {
            if let Ok(f) = self.to_cert(prec).floor_certified() {
                return f;
            }
            prec *= 2;
        }
    }

    pub fn to_cert(&self, prec: u32) -> CertReal {
        let work = prec + 8;
        let root = CertReal::sqrt_int(&self.d, work).expect("d > 1");
        let a = CertReal::from_rational(self.a.as_big(), work);
        let b = CertReal::from_rational(self.b.as_big(), work);
        a.add(&b.mul(&root)).with_prec(prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_cert(64).to_f64()
    }

    /// `√(a + b√d)` as `p + q√d` when such rationals exist.
    pub fn sqrt_denest(&self) -> Option<SurdOrRational> {
        if self.signum() == Ordering::Less {
            return None;
        }
        let n = self.norm();
        let r = rational_sqrt_exact(&n)?;
        let two = Rational::from_int(2);
        for cand in [&self.a + &r, &self.a - &r] {
            let half = cand.checked_div(&two).ok()?;
            if half.is_negative() || half.is_zero() {
                continue;
            }
            if let Some(p) = rational_sqrt_exact(&half) {
                let q = self.b.checked_div(&(&two * &p)).ok()?;
                let s = QuadraticSurd {
                    a: p,
                    b: q,
                    d: self.d.clone(),
                };
                // sign choice: the root must be positive
                let s = if s.signum() == Ordering::Less { s.neg() } else { s };
                if let SurdOrRational::Surd(ref t) = s.mul(&s) {
                    if t == self {
                        return Some(SurdOrRational::Surd(s));
                    }
                }
            }
        }
        None
    }

    fn common_parts(&self) -> (BigInt, BigInt, BigInt) {
        let c = self.a.den().lcm(self.b.den());
        let an = self.a.num() * (&c / self.a.den());
        let bn = self.b.num() * (&c / self.b.den());
        (an, bn, c)
    }
}

/// Exact sign of `a + b√d` for `d > 0` not a perfect square.
fn sign_of(a: &Rational, b: &Rational, d: &BigInt) -> Ordering {
    let sa = a.as_big().signum();
    let sb = b.as_big().signum();
    let (sa, sb) = (sign_ord(&sa.to_integer()), sign_ord(&sb.to_integer()));
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    let a2 = a * a;
    let b2d = &(b * b) * &Rational::from_int(d.clone());
    // |a| vs |b|√d
    match a2.cmp(&b2d) {
        Ordering::Greater => sa,
        _ => sb,
    }
}

fn sign_ord(n: &BigInt) -> Ordering {
    n.cmp(&BigInt::zero())
}

pub(crate) fn rational_sqrt_exact(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let p = r.num().sqrt();
    let q = r.den().sqrt();
    if &(&p * &p) == r.num() && &(&q * &q) == r.den() {
        Some(Rational::new(p, q).ok()?)
    } else {
        None
    }
}

const TRIAL_LIMIT: u64 = 1 << 16;

/// `n = f²·s` with `s` squarefree, when the factorisation can be certified cheaply.
pub(crate) fn squarefree_split(n: &BigInt) -> Option<(BigInt, BigInt)> {
    debug_assert!(n.is_positive());
    let mut rest = n.clone();
    let mut f = BigInt::one();
    let mut s = BigInt::one();
    let mut p = 2u64;
    let mut exhausted = true;
    while p < TRIAL_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            exhausted = false;
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            f *= num_traits::pow(bp.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                s *= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() || !exhausted {
        return Some((f, s * rest));
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        return Some((f * root, s));
    }
    // no prime factor below 2^16: below 2^48 a non-square is p or p·q
    if rest.bits() <= 48 {
        return Some((f, s * rest));
    }
    None
}

fn is_squarefree_small(d: &BigInt) -> bool {
    match squarefree_split(d) {
        Some((f, _)) => f.is_one(),
        None => true,
    }
}

impl fmt::Display for QuadraticSurd {
    /// `(A+B√d)/C` with integers; the denominator is omitted when it is one.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c) = self.common_parts();
        let root = match b.to_i64() {
            Some(1) => format!("√{}", self.d),
            Some(-1) => format!("-√{}", self.d),
            _ => format!("{}√{}", b, self.d),
        };
        let body = if a.is_zero() {
            root
        } else if b.is_negative() {
            format!("{a}{root}")
        } else {
            format!("{a}+{root}")
        };
        if c.is_one() {
            f.write_str(&body)
        } else {
            write!(f, "({body})/{c}")
        }
    }
}
