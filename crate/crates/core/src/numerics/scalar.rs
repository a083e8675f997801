use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::rational::Rational;
use super::real::CertReal;
use super::surd::{rational_sqrt_exact, squarefree_split, QuadraticSurd, SurdOrRational};
use crate::error::{Error, Result};
use crate::{DEFAULT_PREC, MAX_PREC};

/// A number under one of the three backends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(Rational),
    Surd(QuadraticSurd),
    Real(CertReal),
}

impl From<SurdOrRational> for Scalar {
    fn from(s: SurdOrRational) -> Scalar {
        match s {
            SurdOrRational::Surd(s) => Scalar::Surd(s),
            SurdOrRational::Rational(r) => Scalar::Rational(r),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Scalar {
        Scalar::Rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::Rational(Rational::from_int(n))
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Scalar {
        Scalar::Rational(Rational::from_int(n))
    }
}

impl From<CertReal> for Scalar {
    fn from(x: CertReal) -> Scalar {
        Scalar::Real(x)
    }
}

enum Pair<'a> {
    Rat(&'a Rational, &'a Rational),
    Surd(QuadraticSurd, QuadraticSurd),
    Real(CertReal, CertReal),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::from(0)
    }

    pub fn ratio(p: i64, q: i64) -> Result<Scalar> {
        Rational::new(p, q).map(Scalar::Rational)
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Real(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Precision carried by a certified value; exact values report none.
    pub fn prec(&self) -> Option<u32> {
        match self {
            Scalar::Real(x) => Some(x.prec()),
            _ => None,
        }
    }

    pub fn to_cert(&self, prec: u32) -> CertReal {
        match self {
            Scalar::Rational(r) => CertReal::from_rational(r.as_big(), prec),
            Scalar::Surd(s) => s.to_cert(prec),
            Scalar::Real(x) => x.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64(),
            Scalar::Surd(s) => s.to_f64(),
            Scalar::Real(x) => x.to_f64(),
        }
    }

    /// Radius of the enclosure; zero on exact backends.
    pub fn radius(&self) -> f64 {
        match self {
            Scalar::Real(x) => x.rad_f64(),
            _ => 0.0,
        }
    }

    fn pair<'a>(&'a self, o: &'a Scalar) -> Pair<'a> {
        use Scalar::*;
        match (self, o) {
            (Rational(a), Rational(b)) => Pair::Rat(a, b),
            (Surd(a), Surd(b)) if a.d() == b.d() => Pair::Surd(a.clone(), b.clone()),
            (Surd(a), Rational(b)) => Pair::Surd(a.clone(), lift(b, a.d())),
            (Rational(a), Surd(b)) => Pair::Surd(lift(a, b.d()), b.clone()),
            _ => {
                let prec = match (self.prec(), o.prec()) {
                    (Some(p), Some(q)) => p.max(q),
                    (Some(p), None) | (None, Some(p)) => p,
                    (None, None) => DEFAULT_PREC,
                };
                Pair::Real(self.to_cert(prec), o.to_cert(prec))
            }
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match self.pair(o) {
            Pair::Rat(a, b) => Scalar::Rational(a + b),
            Pair::Surd(a, b) => a.add(&b).into(),
            Pair::Real(a, b) => Scalar::Real(a.add(&b)),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        match self.pair(o) {
            Pair::Rat(a, b) => Scalar::Rational(a - b),
            Pair::Surd(a, b) => a.sub(&b).into(),
            Pair::Real(a, b) => Scalar::Real(a.sub(&b)),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match self.pair(o) {
            Pair::Rat(a, b) => Scalar::Rational(a * b),
            Pair::Surd(a, b) => a.mul(&b).into(),
            Pair::Real(a, b) => Scalar::Real(a.mul(&b)),
        }
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Surd(s) => Scalar::Surd(s.neg()),
            Scalar::Real(x) => Scalar::Real(x.neg()),
        }
    }

    pub fn abs(&self) -> Result<Scalar> {
        Ok(if self.signum()? == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        })
    }

    pub fn recip(&self) -> Result<Scalar> {
        match self {
            Scalar::Rational(r) => r.recip().map(Scalar::Rational),
            Scalar::Surd(s) => Ok(Scalar::Surd(s.recip())),
            Scalar::Real(x) => x.recip().map(Scalar::Real),
        }
    }

    pub fn add_int(&self, n: i64) -> Scalar {
        self.add(&Scalar::from(n))
    }

    pub fn mul_int(&self, n: i64) -> Scalar {
        self.mul(&Scalar::from(n))
    }

    /// Exact sign on exact backends, certified sign on [`CertReal`].
    pub fn signum(&self) -> Result<Ordering> {
        match self {
            Scalar::Rational(r) => Ok(r.as_big().cmp(&Zero::zero())),
            Scalar::Surd(s) => Ok(s.signum()),
            Scalar::Real(x) => x.signum_certified(),
        }
    }

    pub fn is_zero_exact(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_zero())
    }

    pub fn compare(&self, o: &Scalar) -> Result<Ordering> {
        match self.pair(o) {
            Pair::Rat(a, b) => Ok(a.cmp(b)),
            Pair::Surd(a, b) => Ok(match a.sub(&b) {
                SurdOrRational::Surd(s) => s.signum(),
                SurdOrRational::Rational(r) => r.as_big().cmp(&Zero::zero()),
            }),
            Pair::Real(a, b) => {
                if self.is_exact() && o.is_exact() {
                    // distinct radicands: never equal, so rising precision decides
                    let mut prec = a.prec();
                    loop {
                        match self.to_cert(prec).cmp_certified(&o.to_cert(prec)) {
                            Ok(ord) => return Ok(ord),
                            Err(e) if e.is_precision() && prec < MAX_PREC * 4 => prec *= 2,
                            Err(e) => return Err(e),
                        }
                    }
                }
                a.cmp_certified(&b)
            }
        }
    }

    pub fn floor_certified(&self) -> Result<BigInt> {
        match self {
            Scalar::Rational(r) => Ok(r.floor()),
            Scalar::Surd(s) => Ok(s.floor()),
            Scalar::Real(x) => x.floor_certified(),
        }
    }

    /// Square root, exact whenever the result lies in a quadratic field.
    pub fn sqrt(&self) -> Result<Scalar> {
        match self {
            Scalar::Rational(r) => sqrt_rational(r, DEFAULT_PREC),
            Scalar::Surd(s) => {
                if s.signum() == Ordering::Less {
                    return Err(Error::NegativeRadicand);
                }
                match s.sqrt_denest() {
                    Some(v) => Ok(v.into()),
                    None => s.to_cert(DEFAULT_PREC).sqrt().map(Scalar::Real),
                }
            }
            Scalar::Real(x) => x.sqrt().map(Scalar::Real),
        }
    }

    /// Re-evaluate a certified value at a new working precision; exact values pass through.
    pub fn with_prec(&self, prec: u32) -> Scalar {
        match self {
            Scalar::Real(x) => Scalar::Real(x.clone().with_prec(prec)),
            other => other.clone(),
        }
    }
}

fn lift(r: &Rational, d: &BigInt) -> QuadraticSurd {
    QuadraticSurd::operand(r.clone(), d.clone())
}

/// `√r`, exact when `r` is a square or its squarefree part can be certified.
pub(crate) fn sqrt_rational(r: &Rational, prec: u32) -> Result<Scalar> {
    if r.is_negative() {
        return Err(Error::NegativeRadicand);
    }
    if let Some(s) = rational_sqrt_exact(r) {
        return Ok(Scalar::Rational(s));
    }
    // √(p/q) = √(pq)/q
    let pq = r.num() * r.den();
    match squarefree_split(&pq) {
        Some((f, d)) => {
            let b = Rational::new(f, r.den().clone())?;
            Ok(QuadraticSurd::new(Rational::zero(), b, d)?.into())
        }
        None => CertReal::from_rational(r.as_big(), prec + 4)
            .sqrt()
            .map(|x| Scalar::Real(x.with_prec(prec))),
    }
}

/// `scale·√d`; exact surd when `d` has a certified squarefree decomposition.
pub fn sqrt_surd(d: &BigInt, scale: &Rational) -> Result<Scalar> {
    if d.is_negative() {
        return Err(Error::NegativeRadicand);
    }
    if d.is_zero() || scale.is_zero() {
        return Ok(Scalar::zero());
    }
    let root = sqrt_rational(&Rational::from_int(d.clone()), DEFAULT_PREC)?;
    Ok(root.mul(&Scalar::Rational(scale.clone())))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => r.fmt(f),
            Scalar::Surd(s) => s.fmt(f),
            Scalar::Real(x) => x.fmt(f),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d).unwrap()
    }

    fn golden() -> Scalar {
        sqrt_surd(&BigInt::from(5), &Rational::one())
            .unwrap()
            .add_int(-1)
            .mul(&q(1, 2))
    }

    #[test]
    fn compare_examples() {
        assert_eq!(q(1, 2).compare(&q(1, 2)).unwrap(), Ordering::Equal);
        assert_eq!(golden().compare(&q(3, 5)).unwrap(), Ordering::Greater);
        let fuzzy = Scalar::Real(CertReal::with_radius(
            q(1, 2).as_rational().unwrap().as_big(),
            q(1, 5).as_rational().unwrap().as_big(),
            DEFAULT_PREC,
        ));
        assert!(matches!(fuzzy.compare(&q(3, 5)), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn floor_examples() {
        assert_eq!(q(7, 10).floor_certified().unwrap(), BigInt::zero());
        assert_eq!(golden().add_int(1).floor_certified().unwrap(), BigInt::from(1));
        let straddle = Scalar::Real(CertReal::with_radius(
            q(2, 1).as_rational().unwrap().as_big(),
            q(1, 10).as_rational().unwrap().as_big(),
            DEFAULT_PREC,
        ));
        assert!(straddle.floor_certified().is_err());
    }

    #[test]
    fn sqrt_surd_examples() {
        let five = sqrt_surd(&BigInt::from(5), &Rational::one()).unwrap();
        assert_eq!(five.to_string(), "√5");
        assert_eq!(sqrt_surd(&BigInt::from(4), &Rational::one()).unwrap(), q(2, 1));
        let s17 = sqrt_surd(&BigInt::from(17), &Rational::one()).unwrap();
        assert!(matches!(&s17, Scalar::Surd(s) if *s.d() == BigInt::from(17)));
        assert_eq!(
            sqrt_surd(&BigInt::from(-3), &Rational::one()),
            Err(Error::NegativeRadicand)
        );
        assert_eq!(
            sqrt_surd(&BigInt::from(12), &Rational::one()).unwrap().to_string(),
            "2√3"
        );
    }

    #[test]
    fn mixed_radicands_fall_back() {
        let s2 = sqrt_surd(&BigInt::from(2), &Rational::one()).unwrap();
        let s3 = sqrt_surd(&BigInt::from(3), &Rational::one()).unwrap();
        let sum = s2.add(&s3);
        assert!(matches!(sum, Scalar::Real(_)));
        assert!((sum.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-14);
        assert_eq!(s2.compare(&s3).unwrap(), Ordering::Less);
    }

    #[test]
    fn surd_collapses_to_rational() {
        let g = golden();
        let prod = g.mul(&g.add_int(1));
        assert_eq!(prod, q(1, 1));
        assert!(g.sub(&g).is_zero_exact());
    }

    #[test]
    fn surd_sqrt_denests() {
        let s2 = sqrt_surd(&BigInt::from(2), &Rational::from_int(2)).unwrap().add_int(3);
        let root = s2.sqrt().unwrap();
        assert_eq!(root, sqrt_surd(&BigInt::from(2), &Rational::one()).unwrap().add_int(1));
    }
}
