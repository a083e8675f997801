//! Scalar literal syntax: `p/q`, integers, `(a+b√d)/c`, `a+b√d`, `√d`, `sqrt(d)`, decimals.

use num_bigint::BigInt;

use super::rational::Rational;
use super::real::CertReal;
use super::scalar::{sqrt_surd, Scalar};
use crate::error::{Error, Result};

/// Parse a literal; decimals become [`CertReal`] enclosures at `prec` bits.
pub fn parse_scalar(src: &str, prec: u32) -> Result<Scalar> {
    let err = || Error::Parse(src.to_string());
    let mut s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    s = s.replace('−', "-");
    while let Some(i) = s.find("sqrt(") {
        let close = s[i..].find(')').ok_or_else(err)? + i;
        let inner = s[i + 5..close].to_string();
        s = format!("{}√{}{}", &s[..i], inner, &s[close + 1..]);
    }
    if s.is_empty() {
        return Err(err());
    }
    if s.contains(['.', 'e', 'E']) && !s.contains('√') {
        let r = parse_decimal(&s).ok_or_else(err)?;
        return Ok(Scalar::Real(CertReal::from_rational(r.as_big(), prec)));
    }
    if let Some(body) = s.strip_prefix('(') {
        let close = body.rfind(')').ok_or_else(err)?;
        let num = parse_sum(&body[..close]).ok_or_else(err)?;
        let rest = &body[close + 1..];
        if rest.is_empty() {
            return Ok(num);
        }
        let den = rest.strip_prefix('/').and_then(parse_rational).ok_or_else(err)?;
        return num.div(&Scalar::Rational(den));
    }
    if let Some((num, den)) = s.rsplit_once('/') {
        if num.contains('√') {
            let n = parse_sum(num).ok_or_else(err)?;
            let d = parse_rational(den).ok_or_else(err)?;
            return n.div(&Scalar::Rational(d));
        }
    }
    parse_sum(&s).ok_or_else(err)
}

fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((p, q)) => Rational::new(p.parse::<BigInt>().ok()?, q.parse::<BigInt>().ok()?).ok(),
        None => Some(Rational::from_int(s.parse::<BigInt>().ok()?)),
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().ok()? / 10;
    let scale = exp - frac.len() as i32;
    let ten = Rational::from_int(10);
    let mut r = &Rational::from_int(digits) * &ten.pow(scale);
    if neg {
        r = -r;
    }
    Some(r)
}

/// Signed terms, each rational or `[coef]√d`.
fn parse_sum(s: &str) -> Option<Scalar> {
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        if (c == '+' || c == '-') && i > 0 {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut acc = Scalar::zero();
    for t in terms {
        acc = acc.add(&parse_term(t)?);
    }
    Some(acc)
}

fn parse_term(t: &str) -> Option<Scalar> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let v = match body.split_once('√') {
        Some((coef, rad)) => {
            let c = if coef.is_empty() {
                Rational::from_int(1)
            } else {
                parse_rational(coef.trim_end_matches('*'))?
            };
            sqrt_surd(&rad.parse::<BigInt>().ok()?, &c).ok()?
        }
        None => Scalar::Rational(parse_rational(body)?),
    };
    Some(if neg { v.neg() } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_PREC;

    fn p(s: &str) -> Scalar {
        parse_scalar(s, DEFAULT_PREC).unwrap()
    }

    #[test]
    fn rationals() {
        assert_eq!(p("3/5"), Scalar::ratio(3, 5).unwrap());
        assert_eq!(p("-7"), Scalar::from(-7));
        assert_eq!(p("6/4").to_string(), "3/2");
    }

    #[test]
    fn surds_round_trip_through_display() {
        for lit in [
            "(-1+√5)/2",
            "√5",
            "1+√2",
            "(3-2√7)/5",
            "sqrt(17)",
            "(1+sqrt(5))/2",
            "-√3",
        ] {
            let v = p(lit);
            assert!(matches!(v, Scalar::Surd(_)), "{lit}");
            assert_eq!(p(&v.to_string()), v, "{lit}");
        }
        assert_eq!(p("√4"), Scalar::from(2));
    }

    #[test]
    fn decimals_are_certified() {
        let x = p("0.3");
        assert!(matches!(x, Scalar::Real(_)));
        assert!(x
            .to_cert(DEFAULT_PREC)
            .encloses(Scalar::ratio(3, 10).unwrap().as_rational().unwrap().as_big()));
        assert!((p("-1.5e-2").to_f64() + 0.015).abs() < 1e-18);
    }

    #[test]
    fn garbage_is_rejected() {
        for bad in ["", "abc", "1/0", "(1+√5", "1.2.3", "√-1"] {
            assert!(parse_scalar(bad, DEFAULT_PREC).is_err(), "{bad}");
        }
    }
}
