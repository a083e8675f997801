use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(pub(crate) BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rational> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Rational {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    pub fn num(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn den(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn recip(&self) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, o: &Rational) -> Result<Rational> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &o.0))
    }

    pub fn pow(&self, e: i32) -> Rational {
        Rational(num_traits::Pow::pow(&self.0, e))
    }

    pub fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.0).unwrap_or(f64::NAN)
    }

    /// `(a x + b) / (c x + d)` for integer coefficients with `ad - bc != 0`.
    ///
    /// Any common factor of the new numerator and denominator divides the determinant,
    /// so reduction only needs remainders modulo a small number.
    pub fn mobius(&self, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Result<Rational> {
        let (p, q) = (self.num(), self.den());
        let mut n = a * p + b * q;
        let mut m = c * p + d * q;
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let det = (a * d - b * c).abs();
        debug_assert!(!det.is_zero());
        if !det.is_one() {
            let g = det.gcd(&n.mod_floor(&det)).gcd(&m.mod_floor(&det));
            if !g.is_one() {
                n /= &g;
                m /= &g;
            }
        }
        if m.is_negative() {
            n = -n;
            m = -m;
        }
        Ok(Rational(BigRational::new_raw(n, m)))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Rational {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Rational {
        Rational::from_int(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Rational {
        Rational(r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $f(self, o: &Rational) -> Rational {
                Rational((&self.0).$f(&o.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $f(self, o: Rational) -> Rational {
                Rational(self.0.$f(o.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div<&Rational> for &Rational {
    type Output = Rational;
    /// Panics on a zero divisor; use [`Rational::checked_div`] when that can happen.
    fn div(self, o: &Rational) -> Rational {
        Rational(&self.0 / &o.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
