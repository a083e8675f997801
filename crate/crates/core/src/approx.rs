//! Approximation coefficients: θ, the Ψ homeomorphism, D(u,v), digit recovery,
//! the g_a extension rule and BAC reconstruction.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::{convergents, digit_scalar, to_digit, DigitStream, Params};
use crate::natural_extension::DynamicPair;
use crate::numerics::Scalar;

/// `θ_{n−1} = 1/(x_n − y_n)` for the pair at time `n`.
pub fn theta(pair: &DynamicPair) -> Result<Scalar> {
    let diff = pair.x().sub(pair.y());
    if diff.is_zero_exact() {
        return Err(Error::DegenerateOrbit("x = y: θ is infinite".into()));
    }
    diff.recip()
}

/// Classical `q_n²·|x − p_n/q_n|` for `k = 1`.
pub fn theta_classical(p: &Params, seed: &Scalar, n: usize) -> Result<Scalar> {
    if *p.k() != Scalar::from(1) {
        return Err(Error::InvalidParams("the classical coefficient needs k = 1".into()));
    }
    let digits: Vec<u64> = DigitStream::new(p, seed.clone()).take(n).collect::<Result<_>>()?;
    if digits.len() < n {
        return Err(Error::RationalSeed { digits: digits.len() });
    }
    let conv = convergents(p, &digits)?;
    let c = &conv[n];
    let q2 = c.q.mul(&c.q);
    Ok(q2.mul(&seed.sub(&c.p.div(&c.q)?).abs()?))
}

/// `(θ_{n−1}, θ_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JagerPair {
    pub u: Scalar,
    pub v: Scalar,
}

impl JagerPair {
    pub fn new(u: Scalar, v: Scalar) -> JagerPair {
        JagerPair { u, v }
    }

    pub fn radius(&self) -> f64 {
        self.u.radius().max(self.v.radius())
    }
}

/// `Ψ(x,y) = (1/(x−y), (m−x)(m−y)/((2m−1)k(x−y)))`.
pub fn psi(pair: &DynamicPair) -> Result<JagerPair> {
    let p = pair.params();
    let u = theta(pair)?;
    let m = p.m_scalar();
    let num = m.sub(pair.x()).mul(&m.sub(pair.y()));
    let v = num.mul(&u).div(&p.k().mul_int(-p.sign()))?;
    Ok(JagerPair { u, v })
}

/// `D(u,v) = √(1 + 4(2m−1)k·uv)`.
pub fn discriminant(p: &Params, u: &Scalar, v: &Scalar) -> Result<Scalar> {
    let rad = Scalar::from(1).add(&p.k().mul_int(-4 * p.sign()).mul(u).mul(v));
    rad.sqrt()
}

/// `Ψ⁻¹(u,v) = (m + (1−D)/(2u), m − (1+D)/(2u))`.
pub fn psi_inv(p: &Params, jp: &JagerPair) -> Result<DynamicPair> {
    if jp.u.is_zero_exact() {
        return Err(Error::DegenerateInput("Ψ⁻¹ is undefined at u = 0".into()));
    }
    let d = discriminant(p, &jp.u, &jp.v)?;
    let two_u = jp.u.mul_int(2);
    let m = p.m_scalar();
    let x = m.add(&Scalar::from(1).sub(&d).div(&two_u)?);
    let y = m.sub(&Scalar::from(1).add(&d).div(&two_u)?);
    DynamicPair::new(p, x, y)
}

fn floor_digit(p: &Params, d: &Scalar, w: &Scalar) -> Result<u64> {
    if w.is_zero_exact() {
        return Err(Error::DegenerateInput(
            "digit recovery needs a positive coefficient".into(),
        ));
    }
    let r = d.add_int(1).div(&w.mul_int(2))?.sub(p.k());
    to_digit(&r.floor_certified()?)
}

/// `a_{n+1} = ⌊(D(u,v) + 1)/(2v) − k⌋` for `(u,v) = (θ_{n−1}, θ_n)`.
pub fn recover_digit(p: &Params, jp: &JagerPair) -> Result<u64> {
    let d = discriminant(p, &jp.u, &jp.v)?;
    floor_digit(p, &d, &jp.v)
}

/// The same digit from the following pair: `⌊(D(θ_n, θ_{n+1}) + 1)/(2θ_n) − k⌋`.
pub fn recover_digit_from_next(p: &Params, next: &JagerPair) -> Result<u64> {
    let d = discriminant(p, &next.u, &next.v)?;
    floor_digit(p, &d, &next.u)
}

/// `g_a(u,v) = u + D(u,v)(m+k+a)/((1−2m)k) + v(m+k+a)²/((2m−1)k)`.
pub fn g_eval(p: &Params, a: u64, u: &Scalar, v: &Scalar) -> Result<Scalar> {
    let d = discriminant(p, u, v)?;
    g_with_d(p, a, u, v, &d)
}

fn g_with_d(p: &Params, a: u64, u: &Scalar, v: &Scalar, d: &Scalar) -> Result<Scalar> {
    let c = p.m_scalar().add(p.k()).add(&digit_scalar(a));
    let sk = p.k().mul_int(p.sign());
    let t1 = d.mul(&c).div(&sk)?;
    let t2 = v.mul(&c).mul(&c).div(&sk.neg())?;
    Ok(u.add(&t1).add(&t2))
}

/// `𝒦 = Ψ𝒯Ψ⁻¹`: `(u,v) ↦ (v, g_a(u,v))` with `a` recovered from `(u,v)`.
pub fn k_map(p: &Params, jp: &JagerPair) -> Result<(JagerPair, u64)> {
    let d = discriminant(p, &jp.u, &jp.v)?;
    let a = floor_digit(p, &d, &jp.v)?;
    let w = g_with_d(p, a, &jp.u, &jp.v, &d)?;
    Ok((JagerPair::new(jp.v.clone(), w), a))
}

/// `𝒦⁻¹`: `(θ_n, θ_{n+1}) ↦ (g_a(θ_{n+1}, θ_n), θ_n)` with `a = a_{n+1}`.
pub fn k_map_inverse(p: &Params, jp: &JagerPair) -> Result<(JagerPair, u64)> {
    let d = discriminant(p, &jp.u, &jp.v)?;
    let a = floor_digit(p, &d, &jp.u)?;
    let w = g_with_d(p, a, &jp.v, &jp.u, &d)?;
    Ok((JagerPair::new(w, jp.u.clone()), a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BacEntry {
    pub n: i64,
    pub theta: Scalar,
    /// `a_{n+1}` when it was recovered.
    pub digit: Option<u64>,
}

/// θ over an index window, indexed so the seed pair is `(θ_{−1}, θ_0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BacWindow {
    pub seed: JagerPair,
    pub direction: Direction,
    /// Ascending in `n`.
    pub entries: Vec<BacEntry>,
    /// Extension stopped early because precision ran out.
    pub truncated: bool,
}

impl BacWindow {
    pub fn theta(&self, n: i64) -> Option<&Scalar> {
        self.entries.iter().find(|e| e.n == n).map(|e| &e.theta)
    }

    pub fn digit(&self, n: i64) -> Option<u64> {
        self.entries.iter().find(|e| e.n == n).and_then(|e| e.digit)
    }

    /// Re-index so the seed pair becomes `(θ_{base−1}, θ_base)`.
    pub fn shifted(mut self, base: i64) -> BacWindow {
        for e in &mut self.entries {
            e.n += base;
        }
        self
    }
}

/// Extend a BAC `steps` terms from a Jager pair in one time direction.
pub fn extend_bac(p: &Params, seed: &JagerPair, direction: Direction, steps: usize) -> Result<BacWindow> {
    let mut entries = vec![
        BacEntry {
            n: -1,
            theta: seed.u.clone(),
            digit: None,
        },
        BacEntry {
            n: 0,
            theta: seed.v.clone(),
            digit: None,
        },
    ];
    let mut truncated = false;
    let mut cur = seed.clone();
    for i in 0..steps as i64 {
        let step = match direction {
            Direction::Forward => k_map(p, &cur),
            Direction::Backward => k_map_inverse(p, &cur),
        };
        let (next, a) = match step {
            Ok(s) => s,
            Err(Error::PrecisionExhausted { .. }) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        match direction {
            Direction::Forward => {
                // pair (θ_{i−1}, θ_i) yields a_{i+1} and θ_{i+1}
                entries[(i + 1) as usize].digit = Some(a);
                entries.push(BacEntry {
                    n: i + 1,
                    theta: next.v.clone(),
                    digit: None,
                });
            }
            Direction::Backward => {
                // pair (θ_{−i−1}, θ_{−i}) yields a_{−i} and θ_{−i−2}
                entries[0].digit = Some(a);
                entries.insert(
                    0,
                    BacEntry {
                        n: -i - 2,
                        theta: next.u.clone(),
                        digit: None,
                    },
                );
            }
        }
        cur = next;
    }
    Ok(BacWindow {
        seed: seed.clone(),
        direction,
        entries,
        truncated,
    })
}

/// Outcome of a Γ-membership check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaStatus {
    /// Every inequality holds (certified).
    Holds,
    /// Some slack is negative by less than the enclosure radius.
    Consistent,
    /// Some slack is certainly negative.
    Violated,
}

/// Slacks `1 − ku − (1−2m)v`, `1 − (1−2m)u − kv`, and for `m = 0` also `1 − 4kuv`.
pub fn gamma_slacks(p: &Params, jp: &JagerPair) -> Vec<Scalar> {
    let one = Scalar::from(1);
    let s = Scalar::from(p.sign());
    let k = p.k();
    let mut out = vec![
        one.sub(&k.mul(&jp.u)).sub(&s.mul(&jp.v)),
        one.sub(&s.mul(&jp.u)).sub(&k.mul(&jp.v)),
    ];
    if p.m() == 0 {
        out.push(one.sub(&k.mul_int(4).mul(&jp.u).mul(&jp.v)));
    }
    out
}

pub fn gamma_check(p: &Params, jp: &JagerPair) -> GammaStatus {
    let mut status = GammaStatus::Holds;
    for s in gamma_slacks(p, jp) {
        match s.signum() {
            Ok(Ordering::Less) => return GammaStatus::Violated,
            Ok(_) => {}
            Err(_) => status = GammaStatus::Consistent,
        }
    }
    status
}

/// Which normalisation of the digit–discriminant identity to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorollaryForm {
    /// `(D_n + D_{n+1}) / (2(1−2m)θ_n)`
    Stated,
    /// `(D_n + D_{n+1}) / (2θ_n)`
    Corrected,
}

/// `(m+k+a_{n+1}) − (D_n + D_{n+1})/(2c·θ_n)` from `θ_{n−1}, θ_n, θ_{n+1}`.
pub fn corollary_residual(p: &Params, thetas: [&Scalar; 3], a_next: u64, form: CorollaryForm) -> Result<Scalar> {
    let [prev, cur, next] = thetas;
    let dn = discriminant(p, prev, cur)?;
    let dn1 = discriminant(p, cur, next)?;
    let scale = match form {
        CorollaryForm::Stated => 2 * p.sign(),
        CorollaryForm::Corrected => 2,
    };
    let rhs = dn.add(&dn1).div(&cur.mul_int(scale))?;
    let lhs = p.m_scalar().add(p.k()).add(&digit_scalar(a_next));
    Ok(lhs.sub(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_scalar;
    use crate::DEFAULT_PREC;

    fn lit(s: &str) -> Scalar {
        parse_scalar(s, DEFAULT_PREC).unwrap()
    }

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d).unwrap()
    }

    fn golden_pair() -> DynamicPair {
        let xi = lit("(-1+√5)/2");
        DynamicPair::new(&Params::rational(0, 1, 1), xi.clone(), q(-1, 1).sub(&xi)).unwrap()
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&golden_pair()).unwrap(), lit("√5/5"));
        let p = Params::rational(0, 2, 1);
        assert_eq!(
            theta(&DynamicPair::new(&p, q(0, 1), q(-2, 1)).unwrap()).unwrap(),
            q(1, 2)
        );
        let r = Params::rational(1, 1, 1);
        let xi = lit("(-1+√5)/2");
        let pair = DynamicPair::new(&r, xi.clone(), q(-1, 1).sub(&xi)).unwrap();
        assert_eq!(theta(&pair).unwrap(), lit("√5/5"));
        let zero = DynamicPair::new(&r, q(0, 1), q(0, 1)).unwrap();
        assert!(matches!(theta(&zero), Err(Error::DegenerateOrbit(_))));
    }

    #[test]
    fn psi_examples() {
        let c = lit("√5/5");
        assert_eq!(psi(&golden_pair()).unwrap(), JagerPair::new(c.clone(), c));
        let g = Params::rational(0, 1, 1);
        let pair = DynamicPair::new(&g, q(1, 2), q(-3, 2)).unwrap();
        assert_eq!(psi(&pair).unwrap(), JagerPair::new(q(1, 2), q(3, 8)));
    }

    #[test]
    fn discriminant_examples() {
        let g = Params::rational(0, 1, 1);
        let r = Params::rational(1, 1, 1);
        let c = lit("√5/5");
        assert_eq!(discriminant(&g, &q(0, 1), &q(7, 3)).unwrap(), q(1, 1));
        assert_eq!(discriminant(&g, &c, &c).unwrap(), c);
        assert_eq!(discriminant(&r, &c, &c).unwrap(), lit("3√5/5"));
        assert_eq!(discriminant(&g, &q(1, 1), &q(1, 1)), Err(Error::NegativeRadicand));
    }

    #[test]
    fn psi_inv_examples() {
        let g = Params::rational(0, 1, 1);
        let c = lit("√5/5");
        assert_eq!(psi_inv(&g, &JagerPair::new(c.clone(), c)).unwrap(), golden_pair());
        let back = psi_inv(&g, &JagerPair::new(q(1, 2), q(3, 8))).unwrap();
        assert_eq!((back.x().clone(), back.y().clone()), (q(1, 2), q(-3, 2)));
        assert!(matches!(
            psi_inv(&g, &JagerPair::new(q(0, 1), q(1, 2))),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn recover_digit_examples() {
        let c = lit("√5/5");
        let jp = JagerPair::new(c.clone(), c);
        assert_eq!(recover_digit(&Params::rational(0, 1, 1), &jp).unwrap(), 0);
        assert_eq!(recover_digit(&Params::rational(1, 1, 1), &jp).unwrap(), 1);
    }

    #[test]
    fn g_fixed_points() {
        let c = lit("√5/5");
        assert_eq!(g_eval(&Params::rational(0, 1, 1), 0, &c, &c).unwrap(), c);
        assert_eq!(g_eval(&Params::rational(1, 1, 1), 1, &c, &c).unwrap(), c);
    }

    #[test]
    fn commuting_square_on_a_rational_pair() {
        for p in [Params::rational(0, 1, 1), Params::rational(1, 3, 2)] {
            let y = p.y_top().sub(&q(7, 11));
            let pair = DynamicPair::new(&p, q(5, 13), y).unwrap();
            let jp = psi(&pair).unwrap();
            let (next, a) = pair.step().unwrap();
            let (kjp, b) = k_map(&p, &jp).unwrap();
            assert_eq!(a, b);
            assert_eq!(kjp, psi(&next).unwrap());
            let (back, c) = k_map_inverse(&p, &kjp).unwrap();
            assert_eq!((back, c), (jp, a));
        }
    }

    #[test]
    fn constant_window() {
        let c = lit("√5/5");
        let w = extend_bac(
            &Params::rational(0, 1, 1),
            &JagerPair::new(c.clone(), c.clone()),
            Direction::Forward,
            6,
        )
        .unwrap();
        assert_eq!(w.entries.len(), 8);
        assert!(w.entries.iter().all(|e| e.theta == c));
        assert!(w.entries.iter().filter_map(|e| e.digit).all(|a| a == 0));
        assert!(!w.truncated);
    }

    #[test]
    fn backward_window_indices() {
        let p = Params::rational(0, 2, 1);
        let y = p.y_top().sub(&q(3, 7));
        let pair = DynamicPair::new(&p, q(4, 9), y).unwrap();
        let (p1, _) = pair.step().unwrap();
        let (p2, a2) = p1.step().unwrap();
        let jp = psi(&p2).unwrap();
        let w = extend_bac(&p, &jp, Direction::Backward, 1).unwrap();
        assert_eq!(w.entries.iter().map(|e| e.n).collect::<Vec<_>>(), vec![-2, -1, 0]);
        assert_eq!(w.theta(-2).unwrap(), &psi(&p1).unwrap().u);
        assert_eq!(w.digit(-1), Some(a2));
    }

    #[test]
    fn gamma_membership() {
        let g = Params::rational(0, 1, 1);
        assert_eq!(gamma_check(&g, &JagerPair::new(q(1, 2), q(3, 8))), GammaStatus::Holds);
        assert_eq!(
            gamma_check(&g, &JagerPair::new(q(1, 1), q(1, 2))),
            GammaStatus::Violated
        );
    }

    #[test]
    fn classical_theta_at_depth_zero() {
        let g = Params::rational(0, 1, 1);
        assert_eq!(theta_classical(&g, &lit("√2-1"), 0).unwrap(), lit("√2-1"));
        assert!(matches!(
            theta_classical(&g, &q(3, 5), 5),
            Err(Error::RationalSeed { digits: 3 })
        ));
        assert!(theta_classical(&Params::rational(0, 2, 1), &lit("√2-1"), 1).is_err());
    }

    #[test]
    fn golden_classical_theta_converges() {
        let g = Params::rational(0, 1, 1);
        let t = theta_classical(&g, &lit("(-1+√5)/2"), 12).unwrap();
        assert!((t.to_f64() - 1.0 / 5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn corollary_on_constant_pair() {
        let c = lit("√5/5");
        let g = Params::rational(0, 1, 1);
        let r = corollary_residual(&g, [&c, &c, &c], 0, CorollaryForm::Stated).unwrap();
        assert!(r.is_zero_exact());
        let p = Params::rational(1, 1, 1);
        let corr = corollary_residual(&p, [&c, &c, &c], 1, CorollaryForm::Corrected).unwrap();
        assert!(corr.is_zero_exact());
        let stated = corollary_residual(&p, [&c, &c, &c], 1, CorollaryForm::Stated).unwrap();
        assert_eq!(stated, Scalar::from(6));
    }
}
