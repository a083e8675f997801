//! Certified high-precision reals: a dyadic midpoint with an outward-rounded radius.
//!
//! A [`CertReal`] stands for every real in `[mid - rad, mid + rad]`. Every arithmetic
//! operation rounds the midpoint to the working precision and adds a bound for the
//! rounding error and for the propagated input radii to the output radius, so the
//! true value of any expression evaluated on enclosures stays enclosed.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAG_BITS: u32 = 32;
const MAG_TOP: u64 = 1 << MAG_BITS;

/// Non-negative magnitude `man * 2^exp` with a 32-bit mantissa; used for radii.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub(crate) const ZERO: Mag = Mag { man: 0, exp: 0 };

    pub(crate) fn is_zero(&self) -> bool {
        self.man == 0
    }

    /// Exactly `2^e`.
    pub(crate) fn pow2(e: i64) -> Mag {
        Mag {
            man: 1 << (MAG_BITS - 1),
            exp: e - (MAG_BITS as i64 - 1),
        }
    }

    fn from_u128(v: u128, exp: i64, up: bool) -> Mag {
        if v == 0 {
            return Mag::ZERO;
        }
        let bits = 128 - v.leading_zeros();
        if bits <= MAG_BITS {
            let sh = MAG_BITS - bits;
            return Mag {
                man: (v << sh) as u64,
                exp: exp - sh as i64,
            };
        }
        let sh = bits - MAG_BITS;
        let mut man = (v >> sh) as u64;
        let mut e = exp + sh as i64;
        if up && v & ((1u128 << sh) - 1) != 0 {
            man += 1;
            if man == MAG_TOP {
                man >>= 1;
                e += 1;
            }
        }
        Mag { man, exp: e }
    }

    fn from_bigint(m: &BigInt, exp: i64, up: bool) -> Mag {
        let bits = m.bits();
        if bits == 0 {
            return Mag::ZERO;
        }
        let abs = m.magnitude();
        if bits <= 128 {
            return Mag::from_u128(abs.to_u128().unwrap(), exp, up);
        }
        let sh = bits - 128;
        let top = (abs >> sh).to_u128().unwrap();
        // every dropped bit could be set: bump by one unit when rounding up
        let top = if up { top.saturating_add(1) } else { top };
        Mag::from_u128(top, exp + sh as i64, up)
    }

    /// Upper bound of `|m| * 2^exp`.
    pub(crate) fn from_bigint_up(m: &BigInt, exp: i64) -> Mag {
        Mag::from_bigint(m, exp, true)
    }

    /// Lower bound of `|m| * 2^exp`.
    pub(crate) fn from_bigint_down(m: &BigInt, exp: i64) -> Mag {
        Mag::from_bigint(m, exp, false)
    }

    pub(crate) fn add(self, o: Mag) -> Mag {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let d = (hi.exp - lo.exp) as u32;
        if d > 64 {
            return Mag::from_u128(hi.man as u128 + 1, hi.exp, true);
        }
        let v = ((hi.man as u128) << d) + lo.man as u128;
        Mag::from_u128(v, lo.exp, true)
    }

    pub(crate) fn mul(self, o: Mag) -> Mag {
        if self.is_zero() || o.is_zero() {
            return Mag::ZERO;
        }
        Mag::from_u128(self.man as u128 * o.man as u128, self.exp + o.exp, true)
    }

    /// Upper bound of `self / o`; `o` must be non-zero.
    pub(crate) fn div(self, o: Mag) -> Mag {
        debug_assert!(!o.is_zero());
        if self.is_zero() {
            return Mag::ZERO;
        }
        let q = ((self.man as u128) << 64) / o.man as u128 + 1;
        Mag::from_u128(q, self.exp - 64 - o.exp, true)
    }

    /// Lower bound of `max(self - o, 0)`.
    pub(crate) fn sub_down(self, o: Mag) -> Mag {
        if o.is_zero() {
            return self;
        }
        if self.is_zero() || self.exp < o.exp {
            // normalised mantissas: o >= 2^(o.exp+31) > self
            if self.exp < o.exp {
                return Mag::ZERO;
            }
        }
        let d = (self.exp - o.exp) as u32;
        if d > 64 {
            let v = ((self.man as u128) << 64) - 1;
            return Mag::from_u128(v, self.exp - 64, false);
        }
        let a = (self.man as u128) << d;
        let b = o.man as u128;
        if a <= b {
            return Mag::ZERO;
        }
        Mag::from_u128(a - b, o.exp, false)
    }

    fn sqrt(self, up: bool) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        let (mut man, mut exp) = (self.man as u128, self.exp);
        if exp & 1 != 0 {
            man <<= 1;
            exp -= 1;
        }
        let v = man << 64;
        let r = v.isqrt();
        let r = if up && r * r != v { r + 1 } else { r };
        Mag::from_u128(r, (exp - 64) / 2, up)
    }

    pub(crate) fn sqrt_up(self) -> Mag {
        self.sqrt(true)
    }

    pub(crate) fn min(self, o: Mag) -> Mag {
        if self.cmp_mag(&o) == Ordering::Greater {
            o
        } else {
            self
        }
    }

    fn cmp_mag(&self, o: &Mag) -> Ordering {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.exp.cmp(&o.exp).then(self.man.cmp(&o.man)),
        }
    }

    fn to_dyadic(self) -> (BigInt, i64) {
        (BigInt::from(self.man), self.exp)
    }

    pub(crate) fn to_f64(self) -> f64 {
        ldexp(self.man as f64, self.exp)
    }
}

fn ldexp(mut f: f64, mut e: i64) -> f64 {
    while e > 1000 {
        f *= 2f64.powi(1000);
        e -= 1000;
        if f.is_infinite() {
            return f;
        }
    }
    while e < -1000 {
        f *= 2f64.powi(-1000);
        e += 1000;
        if f == 0.0 {
            return f;
        }
    }
    f * 2f64.powi(e as i32)
}

/// `m * 2^e` as an exact integer pair aligned to the smaller exponent.
fn align(a: &BigInt, ea: i64, b: &BigInt, eb: i64) -> (BigInt, BigInt, i64) {
    let e = ea.min(eb);
    (a << (ea - e) as u64, b << (eb - e) as u64, e)
}

fn floor_dyadic(m: &BigInt, e: i64) -> BigInt {
    if e >= 0 {
        m << e as u64
    } else {
        m.div_floor(&(BigInt::one() << (-e) as u64))
    }
}

fn cmp_dyadic(a: &(BigInt, i64), b: &(BigInt, i64)) -> Ordering {
    let (x, y, _) = align(&a.0, a.1, &b.0, b.1);
    x.cmp(&y)
}

/// Round `m * 2^e` to `prec` significant bits; returns the rounding error bound.
fn round(m: BigInt, e: i64, prec: u32) -> (BigInt, i64, Mag) {
    let bits = m.bits();
    if bits <= prec as u64 {
        return (m, e, Mag::ZERO);
    }
    let sh = bits - prec as u64;
    let e2 = e + sh as i64;
    let exact = m.trailing_zeros().is_some_and(|z| z >= sh);
    (m >> sh, e2, if exact { Mag::ZERO } else { Mag::pow2(e2) })
}

/// A real number known to lie in `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertReal {
    mid: BigInt,
    exp: i64,
    rad: Mag,
    prec: u32,
}

impl CertReal {
    pub fn zero(prec: u32) -> CertReal {
        CertReal {
            mid: BigInt::zero(),
            exp: 0,
            rad: Mag::ZERO,
            prec,
        }
    }

    fn from_parts(mid: BigInt, exp: i64, rad: Mag, prec: u32) -> CertReal {
        let (mid, exp, err) = round(mid, exp, prec);
        CertReal {
            mid,
            exp,
            rad: rad.add(err),
            prec,
        }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> CertReal {
        CertReal::from_parts(n.clone(), 0, Mag::ZERO, prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> CertReal {
        CertReal::from_int(&BigInt::from(n), prec)
    }

    /// Nearest enclosure of an exact rational at `prec` bits; radius zero for dyadics that fit.
    pub fn from_rational(r: &BigRational, prec: u32) -> CertReal {
        let (p, q) = (r.numer(), r.denom());
        if p.is_zero() {
            return CertReal::zero(prec);
        }
        if q.is_one() {
            return CertReal::from_int(p, prec);
        }
        let s = prec as i64 + 2 + q.bits() as i64 - p.bits() as i64;
        let (quo, rem) = if s >= 0 {
            (p << s as u64).div_rem(q)
        } else {
            p.div_rem(&(q << (-s) as u64))
        };
        let err = if rem.is_zero() { Mag::ZERO } else { Mag::pow2(-s) };
        CertReal::from_parts(quo, -s, err, prec)
    }

    /// Enclosure of `mid ± rad` for exact rationals.
    pub fn with_radius(mid: &BigRational, rad: &BigRational, prec: u32) -> CertReal {
        let mut x = CertReal::from_rational(mid, prec);
        let r = CertReal::from_rational(&rad.abs(), prec);
        x.rad = x.rad.add(r.rad).add(Mag::from_bigint_up(&r.mid, r.exp));
        x
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Same enclosure, new working precision for subsequent operations.
    pub fn with_prec(mut self, prec: u32) -> CertReal {
        if prec < self.prec {
            let (mid, exp, err) = round(self.mid, self.exp, prec);
            self.mid = mid;
            self.exp = exp;
            self.rad = self.rad.add(err);
        }
        self.prec = prec;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn mid_rational(&self) -> BigRational {
        dyadic_to_rational(&self.mid, self.exp)
    }

    pub fn rad_rational(&self) -> BigRational {
        let (m, e) = self.rad.to_dyadic();
        dyadic_to_rational(&m, e)
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mid.bits();
        if bits <= 64 {
            return ldexp(self.mid.to_f64().unwrap_or(0.0), self.exp);
        }
        let sh = bits - 64;
        let top = (&self.mid >> sh).to_f64().unwrap_or(0.0);
        ldexp(top, self.exp + sh as i64)
    }

    fn lo(&self) -> (BigInt, i64) {
        let (r, re) = self.rad.to_dyadic();
        let (m, r, e) = align(&self.mid, self.exp, &r, re);
        (m - r, e)
    }

    fn hi(&self) -> (BigInt, i64) {
        let (r, re) = self.rad.to_dyadic();
        let (m, r, e) = align(&self.mid, self.exp, &r, re);
        (m + r, e)
    }

    /// Whether the exact rational `v` lies inside the enclosure.
    pub fn encloses(&self, v: &BigRational) -> bool {
        let lo = self.lo();
        let hi = self.hi();
        dyadic_to_rational(&lo.0, lo.1) <= *v && *v <= dyadic_to_rational(&hi.0, hi.1)
    }

    fn top_bit(&self) -> i64 {
        self.mid.bits() as i64 + self.exp
    }

    fn mid_mag_up(&self) -> Mag {
        Mag::from_bigint_up(&self.mid, self.exp)
    }

    pub fn neg(&self) -> CertReal {
        CertReal {
            mid: -&self.mid,
            ..self.clone()
        }
    }

    pub fn abs(&self) -> CertReal {
        CertReal {
            mid: self.mid.abs(),
            ..self.clone()
        }
    }

    pub fn add(&self, o: &CertReal) -> CertReal {
        let prec = self.prec.max(o.prec);
        let rad = self.rad.add(o.rad);
        if o.mid.is_zero() {
            return CertReal::from_parts(self.mid.clone(), self.exp, rad, prec);
        }
        if self.mid.is_zero() {
            return CertReal::from_parts(o.mid.clone(), o.exp, rad, prec);
        }
        // a far smaller operand only widens the radius; avoids huge shifts
        let gap = prec as i64 + 64;
        if o.top_bit() + gap < self.top_bit() {
            return CertReal::from_parts(self.mid.clone(), self.exp, rad.add(o.mid_mag_up()), prec);
        }
        if self.top_bit() + gap < o.top_bit() {
            return CertReal::from_parts(o.mid.clone(), o.exp, rad.add(self.mid_mag_up()), prec);
        }
        let (a, b, e) = align(&self.mid, self.exp, &o.mid, o.exp);
        CertReal::from_parts(a + b, e, rad, prec)
    }

    pub fn sub(&self, o: &CertReal) -> CertReal {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &CertReal) -> CertReal {
        let prec = self.prec.max(o.prec);
        let rad = self
            .mid_mag_up()
            .mul(o.rad)
            .add(o.mid_mag_up().mul(self.rad))
            .add(self.rad.mul(o.rad));
        CertReal::from_parts(&self.mid * &o.mid, self.exp + o.exp, rad, prec)
    }

    pub fn div(&self, o: &CertReal) -> Result<CertReal> {
        let prec = self.prec.max(o.prec);
        let ylo = Mag::from_bigint_down(&o.mid, o.exp).sub_down(o.rad);
        if ylo.is_zero() {
            return if o.mid.is_zero() && o.rad.is_zero() {
                Err(Error::DivisionByZero)
            } else {
                Err(Error::PrecisionExhausted { prec })
            };
        }
        let s = (prec as i64 + 2 + o.mid.bits() as i64 - self.mid.bits() as i64).max(0);
        let q = (&self.mid << s as u64) / &o.mid;
        let qe = self.exp - s - o.exp;
        let q_up = Mag::from_bigint_up(&q, qe).add(Mag::pow2(qe));
        let rad = self.rad.add(q_up.mul(o.rad)).div(ylo).add(Mag::pow2(qe));
        Ok(CertReal::from_parts(q, qe, rad, prec))
    }

    pub fn recip(&self) -> Result<CertReal> {
        CertReal::from_i64(1, self.prec).div(self)
    }

    pub fn sqrt(&self) -> Result<CertReal> {
        let prec = self.prec;
        let zero = (BigInt::zero(), 0);
        if cmp_dyadic(&self.hi(), &zero) == Ordering::Less {
            return Err(Error::NegativeRadicand);
        }
        if cmp_dyadic(&self.lo(), &zero) == Ordering::Less {
            return Err(Error::PrecisionExhausted { prec });
        }
        if self.mid.is_zero() {
            return Ok(CertReal::zero(prec));
        }
        let want = 2 * (prec as i64 + 2);
        let mut s = (want - self.mid.bits() as i64).max(0);
        if (self.exp - s) & 1 != 0 {
            s += 1;
        }
        let r = (&self.mid << s as u64).sqrt();
        let re = (self.exp - s) / 2;
        let mut rad = Mag::pow2(re);
        if !self.rad.is_zero() {
            let root_lo = Mag::from_bigint_down(&r, re);
            let prop = if root_lo.is_zero() {
                self.rad.sqrt_up()
            } else {
                self.rad.div(root_lo).min(self.rad.sqrt_up())
            };
            rad = rad.add(prop);
        }
        Ok(CertReal::from_parts(r, re, rad, prec))
    }

    /// Natural logarithm of a positive enclosure.
    pub fn ln(&self) -> Result<CertReal> {
        let prec = self.prec;
        let lo = Mag::from_bigint_down(&self.mid, self.exp).sub_down(self.rad);
        if self.mid.sign() != Sign::Plus || lo.is_zero() {
            return Err(if self.mid.sign() == Sign::Plus {
                Error::PrecisionExhausted { prec }
            } else {
                Error::OutOfDomain("logarithm of a non-positive value".into())
            });
        }
        let work = prec + 32;
        // mid = f * 2^j with f in [3/4, 3/2)
        let b = self.mid.bits() as i64;
        let mut j = self.exp + b - 1;
        let mut f = CertReal {
            mid: self.mid.clone(),
            exp: -(b - 1),
            rad: Mag::ZERO,
            prec: work,
        };
        if (&self.mid >> (b as u64).saturating_sub(2)) >= BigInt::from(3) {
            f.exp -= 1;
            j += 1;
        }
        let one = CertReal::from_i64(1, work);
        let z = f.sub(&one).div(&f.add(&one))?;
        let mut ln = atanh_series(&z, work)?.mul(&CertReal::from_i64(2, work));
        if j != 0 {
            let third = CertReal::from_i64(1, work).div(&CertReal::from_i64(3, work))?;
            let ln2 = atanh_series(&third, work)?.mul(&CertReal::from_i64(2, work));
            ln = ln.add(&ln2.mul(&CertReal::from_i64(j, work)));
        }
        // |ln x - ln mid| <= rad / (mid - rad)
        ln.rad = ln.rad.add(self.rad.div(lo));
        Ok(ln.with_prec(prec))
    }

    /// Certified ordering; errors when the enclosures overlap and are not both the same exact point.
    pub fn cmp_certified(&self, o: &CertReal) -> Result<Ordering> {
        if self.rad.is_zero() && o.rad.is_zero() {
            let (a, b, _) = align(&self.mid, self.exp, &o.mid, o.exp);
            return Ok(a.cmp(&b));
        }
        if cmp_dyadic(&self.hi(), &o.lo()) == Ordering::Less {
            return Ok(Ordering::Less);
        }
        if cmp_dyadic(&self.lo(), &o.hi()) == Ordering::Greater {
            return Ok(Ordering::Greater);
        }
        Err(Error::PrecisionExhausted {
            prec: self.prec.max(o.prec),
        })
    }

    pub fn signum_certified(&self) -> Result<Ordering> {
        self.cmp_certified(&CertReal::zero(self.prec))
    }

    /// Floor, provided no integer lies in `(lo, hi]`.
    pub fn floor_certified(&self) -> Result<BigInt> {
        let lo = self.lo();
        let hi = self.hi();
        let fl = floor_dyadic(&lo.0, lo.1);
        if fl == floor_dyadic(&hi.0, hi.1) {
            Ok(fl)
        } else {
            Err(Error::PrecisionExhausted { prec: self.prec })
        }
    }

    /// Widen the radius by `err`.
    pub(crate) fn widen(mut self, err: Mag) -> CertReal {
        self.rad = self.rad.add(err);
        self
    }

    /// `sqrt(n)` for a non-negative integer at `prec` bits.
    pub fn sqrt_int(n: &BigInt, prec: u32) -> Result<CertReal> {
        CertReal::from_int(n, prec + 4).sqrt().map(|r| r.with_prec(prec))
    }

    /// Scientific-notation rendering `mid±rad` with as many digits as the radius justifies.
    pub fn to_decimal_string(&self) -> String {
        let max_digits = ((self.prec as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1;
        let digits = if self.mid.is_zero() {
            1
        } else if self.rad.is_zero() {
            max_digits
        } else {
            let ratio = self.top_bit() - (self.rad.exp + MAG_BITS as i64);
            ((ratio.max(0) as f64 * std::f64::consts::LOG10_2) as usize + 2).clamp(1, max_digits)
        };
        let mid = format_sci(&self.mid_rational(), digits);
        if self.rad.is_zero() {
            mid
        } else {
            format!("{}±{:.2e}", mid, self.rad_f64())
        }
    }
}

fn atanh_series(z: &CertReal, prec: u32) -> Result<CertReal> {
    // sum z^(2i+1)/(2i+1) with a geometric tail bound; requires |z| <= 1/3
    let z2 = z.mul(z);
    let mut power = z.clone();
    let mut sum = CertReal::zero(prec);
    let z2_up = z2.mid_mag_up().add(z2.rad);
    let mut i: i64 = 0;
    loop {
        let term = power.div(&CertReal::from_i64(2 * i + 1, prec))?;
        sum = sum.add(&term);
        power = power.mul(&z2);
        i += 1;
        let p_up = power.mid_mag_up().add(power.rad);
        if p_up.is_zero() || p_up.exp + (MAG_BITS as i64) < -(prec as i64) - 8 {
            // tail <= |z|^(2i+1) / (1 - z^2) <= |z|^(2i+1) * 9/8
            let tail = p_up.mul(Mag::from_u128(9, -3, true));
            let denom = Mag::pow2(0).sub_down(z2_up);
            let tail = if denom.is_zero() {
                tail
            } else {
                p_up.div(denom).min(tail.add(tail))
            };
            return Ok(sum.widen(tail));
        }
        if i > 100_000 {
            return Err(Error::PrecisionExhausted { prec });
        }
    }
}

pub(crate) fn dyadic_to_rational(m: &BigInt, e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(m << e as u64)
    } else {
        BigRational::new(m.clone(), BigInt::one() << (-e) as u64)
    }
}

/// `d.ddd…e±X` with `digits` significant digits, rounded to nearest.
pub(crate) fn format_sci(v: &BigRational, digits: usize) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let neg = v.is_negative();
    let a = v.abs();
    let ten = BigInt::from(10);
    let est = (a.numer().bits() as f64 - a.denom().bits() as f64) * std::f64::consts::LOG10_2;
    let mut e10 = est.floor() as i64;
    loop {
        let shift = digits as i64 - 1 - e10;
        let scaled = if shift >= 0 {
            &a * BigRational::from_integer(num_traits::pow(ten.clone(), shift as usize))
        } else {
            &a / BigRational::from_integer(num_traits::pow(ten.clone(), (-shift) as usize))
        };
        let n = scaled.round().to_integer();
        let s = n.to_string();
        if s.len() > digits {
            e10 += 1;
            continue;
        }
        if s.len() < digits {
            e10 -= 1;
            continue;
        }
        let (head, tail) = s.split_at(1);
        let sign = if neg { "-" } else { "" };
        return if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        };
    }
}

impl fmt::Display for CertReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn from_rational_encloses() {
        for (p, d) in [(1, 3), (-7, 10), (22, 7), (1, 1 << 40), (123456789, 1000)] {
            let x = CertReal::from_rational(&q(p, d), 128);
            assert!(x.encloses(&q(p, d)), "{p}/{d}");
            assert!(x.rad_f64() <= x.to_f64().abs() * 1e-37);
        }
        assert!(CertReal::from_rational(&q(3, 8), 64).is_exact());
    }

    #[test]
    fn overlapping_comparison_is_undecided() {
        let x = CertReal::with_radius(&q(1, 2), &q(1, 5), 256);
        let y = CertReal::from_rational(&q(3, 5), 256);
        assert!(matches!(x.cmp_certified(&y), Err(Error::PrecisionExhausted { .. })));
        let z = CertReal::from_rational(&q(4, 5), 256);
        assert_eq!(x.cmp_certified(&z).unwrap(), Ordering::Less);
    }

    #[test]
    fn floor_straddling_integer() {
        let x = CertReal::with_radius(&q(2, 1), &q(1, 10), 256);
        assert!(x.floor_certified().is_err());
        let y = CertReal::with_radius(&q(5, 2), &q(1, 10), 256);
        assert_eq!(y.floor_certified().unwrap(), BigInt::from(2));
        let n = CertReal::from_rational(&q(-1, 3), 256);
        assert_eq!(n.floor_certified().unwrap(), BigInt::from(-1));
        assert_eq!(CertReal::from_i64(2, 64).floor_certified().unwrap(), BigInt::from(2));
    }

    #[test]
    fn sqrt_and_division() {
        let five = CertReal::sqrt_int(&BigInt::from(5), 256).unwrap();
        let sq = five.mul(&five);
        assert!(sq.encloses(&q(5, 1)));
        assert!(sq.rad_f64() < 1e-70);
        let third = CertReal::from_i64(1, 256).div(&CertReal::from_i64(3, 256)).unwrap();
        assert!(third.encloses(&q(1, 3)));
        assert!(CertReal::zero(64).recip().is_err());
        assert_eq!(CertReal::from_i64(-4, 64).sqrt(), Err(Error::NegativeRadicand));
    }

    #[test]
    fn logarithm() {
        let two = CertReal::from_i64(2, 256);
        let ln2 = two.ln().unwrap();
        assert!((ln2.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(ln2.rad_f64() < 1e-70);
        let x = CertReal::from_rational(&q(4, 3), 256).ln().unwrap();
        assert!((x.to_f64() - (4f64 / 3.0).ln()).abs() < 1e-15);
        let big = CertReal::from_i64(1000, 128).ln().unwrap();
        assert!((big.to_f64() - 1000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn decimal_rendering() {
        let x = CertReal::from_rational(&q(1, 4), 64);
        assert_eq!(format_sci(&q(1, 4), 3), "2.50e-1");
        assert!(x.to_decimal_string().starts_with("2.5"));
        let y = CertReal::with_radius(&q(1, 3), &q(1, 1000), 128);
        assert!(y.to_string().contains('±'));
    }
}
