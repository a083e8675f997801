//! Sharp constants ξ_a, C_a and the bound verifiers built on them.

pub mod density;

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::approx::{gamma_check, theta, GammaStatus, JagerPair};
use crate::error::{Error, Result};
use crate::expansion::{digit_scalar, evaluate_finite, Params};
use crate::natural_extension::{reflect, DynamicPair};
use crate::numerics::Scalar;

pub use density::{birkhoff_digit_stats, density_mu, model_digit_probability, DigitStats};

fn c_disc(p: &Params, a: u64) -> Scalar {
    let c = p.m_scalar().add(p.k()).add(&digit_scalar(a));
    c.mul(&c).add(&p.k().mul_int(4 * p.sign()))
}

/// `ξ_a = ½(√((m+k+a)² + 4(1−2m)k) + (m−k−a))`, the fixed point of branch `a`.
pub fn xi(p: &Params, a: u64) -> Result<Scalar> {
    let root = c_disc(p, a).sqrt()?;
    let shift = p.y_top().sub(&digit_scalar(a));
    Ok(root.add(&shift).mul(&Scalar::ratio(1, 2)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ConstValue {
    Finite(Scalar),
    Infinite,
}

impl ConstValue {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            ConstValue::Finite(s) => Some(s),
            ConstValue::Infinite => None,
        }
    }

    /// Ordering of `x` against the constant.
    pub fn cmp_value(&self, x: &Scalar) -> Result<Ordering> {
        match self {
            ConstValue::Finite(c) => x.compare(c),
            ConstValue::Infinite => Ok(Ordering::Less),
        }
    }
}

/// `C_a = 1/√((m+k+a)² + 4(1−2m)k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpConstant {
    pub a: u64,
    pub value: ConstValue,
}

pub fn c_const(p: &Params, a: u64) -> Result<SharpConstant> {
    let root = c_disc(p, a).sqrt()?;
    let value = if root.is_zero_exact() {
        ConstValue::Infinite
    } else {
        ConstValue::Finite(root.recip()?)
    };
    Ok(SharpConstant { a, value })
}

/// `(ξ_a, m − a − k − ξ_a)`, the pair with constant digits and constant BAC.
pub fn constant_pair(p: &Params, a: u64) -> Result<DynamicPair> {
    let x = xi(p, a)?;
    if x.signum()? != Ordering::Greater {
        return Err(Error::DegenerateInput(format!(
            "ξ_{a} = 0 for {p}: the constant pair leaves Ω"
        )));
    }
    let y = p.y_top().sub(&digit_scalar(a)).sub(&x);
    DynamicPair::new(p, x, y)
}

/// Constants per digit, converted once to the window's working precision.
struct ConstCache {
    params: Params,
    prec: Option<u32>,
    map: HashMap<u64, ConstValue>,
}

impl ConstCache {
    fn new(params: &Params, prec: Option<u32>) -> ConstCache {
        ConstCache {
            params: params.clone(),
            prec,
            map: HashMap::new(),
        }
    }

    fn get(&mut self, a: u64) -> Result<ConstValue> {
        if let Some(c) = self.map.get(&a) {
            return Ok(c.clone());
        }
        let mut c = c_const(&self.params, a)?.value;
        if let (Some(prec), ConstValue::Finite(v)) = (self.prec, &c) {
            c = ConstValue::Finite(Scalar::Real(v.to_cert(prec + 16).with_prec(prec)));
        }
        self.map.insert(a, c.clone());
        Ok(c)
    }
}

/// θ and digits along a forward orbit: `θ_{−1} … θ_{N−1}` and `a_1 … a_N`.
#[derive(Clone, Debug)]
pub struct ThetaWindow {
    pub params: Params,
    /// `thetas[i] = θ_{i−1}`
    pub thetas: Vec<Scalar>,
    /// `digits[i] = a_{i+1}`
    pub digits: Vec<u64>,
    /// Γ outcome for each consecutive pair `(θ_{n−1}, θ_n)`.
    pub gamma: GammaTally,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GammaTally {
    pub holds: usize,
    pub consistent: usize,
    pub violated: usize,
}

impl GammaTally {
    pub fn record(&mut self, s: GammaStatus) {
        match s {
            GammaStatus::Holds => self.holds += 1,
            GammaStatus::Consistent => self.consistent += 1,
            GammaStatus::Violated => self.violated += 1,
        }
    }

    pub fn merge(&mut self, o: &GammaTally) {
        self.holds += o.holds;
        self.consistent += o.consistent;
        self.violated += o.violated;
    }

    pub fn total(&self) -> usize {
        self.holds + self.consistent + self.violated
    }
}

impl ThetaWindow {
    /// Run `steps` steps of 𝒯 from `pair`.
    pub fn run(pair: &DynamicPair, steps: usize) -> Result<ThetaWindow> {
        let params = pair.params().clone();
        let mut thetas = vec![theta(pair)?];
        let mut digits = Vec::with_capacity(steps);
        let mut gamma = GammaTally::default();
        let mut cur = pair.clone();
        for _ in 0..steps {
            let (next, a) = cur.step()?;
            let t = theta(&next)?;
            let jp = JagerPair::new(thetas.last().expect("non-empty").clone(), t.clone());
            gamma.record(gamma_check(&params, &jp));
            thetas.push(t);
            digits.push(a);
            cur = next;
        }
        Ok(ThetaWindow {
            params,
            thetas,
            digits,
            gamma,
        })
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `θ_n` for `−1 ≤ n < N`.
    pub fn theta(&self, n: i64) -> &Scalar {
        &self.thetas[(n + 1) as usize]
    }

    /// `a_n` for `1 ≤ n ≤ N`.
    pub fn digit(&self, n: i64) -> u64 {
        self.digits[(n - 1) as usize]
    }

    fn prec(&self) -> Option<u32> {
        self.thetas.iter().filter_map(Scalar::prec).max()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub n: i64,
    pub kind: &'static str,
    pub theta: String,
    pub constant: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundsReport {
    pub params: String,
    pub window: usize,
    pub checked: usize,
    pub min_theta: f64,
    pub max_theta: f64,
    pub violations: Vec<Violation>,
    /// Comparisons the enclosures could not decide.
    pub undecided: usize,
    pub gamma: GammaTally,
    pub liminf_estimate: Option<f64>,
    pub limsup_estimate: Option<f64>,
    pub c_small: Option<String>,
    pub c_large: Option<String>,
    pub closest_to_c_small: Option<f64>,
    pub longest_monotone_run: Option<usize>,
}

impl BoundsReport {
    pub fn merge(&mut self, o: &BoundsReport) {
        if self.checked == 0 {
            self.min_theta = o.min_theta;
            self.max_theta = o.max_theta;
        } else if o.checked > 0 {
            self.min_theta = self.min_theta.min(o.min_theta);
            self.max_theta = self.max_theta.max(o.max_theta);
        }
        self.window += o.window;
        self.checked += o.checked;
        self.violations.extend(o.violations.iter().cloned());
        self.undecided += o.undecided;
        self.gamma.merge(&o.gamma);
    }
}

fn const_string(c: &ConstValue) -> String {
    match c {
        ConstValue::Finite(s) => s.to_string(),
        ConstValue::Infinite => "inf".to_string(),
    }
}

fn min_max(ts: &[Scalar]) -> (f64, f64) {
    ts.iter()
        .map(Scalar::to_f64)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)))
}

/// Gauss-like triple bounds (m = 0) or Renyi-like local-extrema bounds (m = 1) at every
/// interior index of the window.
pub fn triple_bound_report(w: &ThetaWindow) -> Result<BoundsReport> {
    let p = &w.params;
    let mut consts = ConstCache::new(p, w.prec());
    let (min_theta, max_theta) = min_max(&w.thetas);
    let mut rep = BoundsReport {
        params: p.to_string(),
        window: w.len(),
        min_theta,
        max_theta,
        gamma: w.gamma,
        ..BoundsReport::default()
    };
    let n_max = w.len() as i64 - 2;
    for n in 0..=n_max {
        let (t0, t1, t2) = (w.theta(n - 1), w.theta(n), w.theta(n + 1));
        let c = consts.get(w.digit(n + 1))?;
        rep.checked += 1;
        let mut flag = |kind: &'static str, t: &Scalar| {
            rep.violations.push(Violation {
                n,
                kind,
                theta: t.to_string(),
                constant: const_string(&c),
            })
        };
        if p.m() == 0 {
            let cmps = [t0, t1, t2].map(|t| c.cmp_value(t));
            if cmps.iter().any(|r| r.is_err()) {
                // min/max may still be decided by the comparisons that succeeded
                let below = cmps
                    .iter()
                    .any(|r| matches!(r, Ok(Ordering::Less) | Ok(Ordering::Equal)));
                let above = cmps
                    .iter()
                    .any(|r| matches!(r, Ok(Ordering::Greater) | Ok(Ordering::Equal)));
                if !(below && above) {
                    rep.undecided += 1;
                }
                continue;
            }
            let cmps: Vec<Ordering> = cmps.into_iter().map(|r| r.expect("checked")).collect();
            if cmps.iter().all(|&o| o == Ordering::Greater) {
                flag("min above C", t1);
            }
            if cmps.iter().all(|&o| o == Ordering::Less) {
                flag("max below C", t1);
            }
        } else {
            let (l, r) = match (t1.compare(t0), t1.compare(t2)) {
                (Ok(l), Ok(r)) => (l, r),
                _ => {
                    rep.undecided += 1;
                    continue;
                }
            };
            let constant = l == Ordering::Equal && r == Ordering::Equal;
            let is_max = l != Ordering::Less && r != Ordering::Less;
            let is_min = l != Ordering::Greater && r != Ordering::Greater;
            if !(is_max || is_min) {
                continue;
            }
            let ord = match c.cmp_value(t1) {
                Ok(o) => o,
                Err(_) => {
                    rep.undecided += 1;
                    continue;
                }
            };
            if constant {
                if ord != Ordering::Equal {
                    flag("constant triple off C", t1);
                }
                continue;
            }
            if is_max && ord != Ordering::Less {
                flag("local max not below C", t1);
            }
            if is_min && ord != Ordering::Greater {
                flag("local min not above C", t1);
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HurwitzReport {
    pub params: String,
    pub n: usize,
    pub constant: String,
    pub hits: Vec<i64>,
    pub undecided: usize,
    pub required: usize,
    pub gamma: GammaTally,
}

/// All `0 ≤ n < N` with `θ_n ≤ C_0` (m = 0).
pub fn hurwitz_scan(w: &ThetaWindow) -> Result<HurwitzReport> {
    let p = &w.params;
    if p.m() != 0 {
        return Err(Error::InvalidParams("the Hurwitz scan is for m = 0".into()));
    }
    let c0 = ConstCache::new(p, w.prec()).get(0)?;
    let mut hits = Vec::new();
    let mut undecided = 0;
    for n in 0..w.len() as i64 {
        match c0.cmp_value(w.theta(n)) {
            Ok(Ordering::Greater) => {}
            Ok(_) => hits.push(n),
            Err(_) => undecided += 1,
        }
    }
    Ok(HurwitzReport {
        params: p.to_string(),
        n: w.len(),
        constant: const_string(&c_const(p, 0)?.value),
        hits,
        undecided,
        required: (w.len() / 3).saturating_sub(1),
        gamma: w.gamma,
    })
}

/// Settings of the extremal construction for Renyi-like bounds.
#[derive(Clone, Debug)]
pub struct RenyiConfig {
    pub l: u64,
    pub big_l: u64,
    pub depth: usize,
    pub burn_in: usize,
    /// Steps dropped before the finite expansion runs out.
    pub tail: usize,
    pub prec: u32,
    pub tolerance: Scalar,
}

impl RenyiConfig {
    pub fn new(l: u64, big_l: u64, depth: usize, prec: u32) -> RenyiConfig {
        RenyiConfig {
            l,
            big_l,
            depth,
            burn_in: 100,
            tail: 100,
            prec,
            tolerance: Scalar::ratio(1, 1_000_000).expect("non-zero"),
        }
    }
}

/// Digits `L` at `n = 2^j` (`j ≥ 1`) and `l` elsewhere, `n = 1..=depth`.
pub fn extremal_digits(l: u64, big_l: u64, depth: usize) -> Vec<u64> {
    (1..=depth)
        .map(|n| if n >= 2 && n.is_power_of_two() { big_l } else { l })
        .collect()
}

/// Run the extremal construction and check every post-burn-in θ against `[C_L, C_l]`.
pub fn renyi_bounds_experiment(p: &Params, cfg: &RenyiConfig) -> Result<BoundsReport> {
    if p.m() != 1 {
        return Err(Error::InvalidParams("the Renyi bounds experiment is for m = 1".into()));
    }
    if cfg.l > cfg.big_l {
        return Err(Error::InvalidParams("need l ≤ L".into()));
    }
    let c_l = c_const(p, cfg.l)?.value;
    let c_big = c_const(p, cfg.big_l)?.value;
    let (start, steps, designated): (DynamicPair, usize, Vec<i64>) = if cfg.l == cfg.big_l {
        (constant_pair(p, cfg.l)?, cfg.depth.min(1000), Vec::new())
    } else {
        if cfg.depth < cfg.burn_in + cfg.tail + 4 {
            return Err(Error::InvalidParams("depth too small for burn-in and tail".into()));
        }
        let digits = extremal_digits(cfg.l, cfg.big_l, cfg.depth);
        let x0 = evaluate_finite(p, &digits)?;
        let y0 = Scalar::Real(reflect(p, &digits)?.to_cert(cfg.prec));
        let steps = cfg.depth - cfg.tail;
        let designated = (2..)
            .map(|j: u32| (1i64 << j) + (1i64 << (j - 1)))
            .take_while(|&n| n + 1 < steps as i64)
            .filter(|&n| n >= cfg.burn_in as i64)
            .collect();
        (DynamicPair::new(p, x0, y0)?, steps, designated)
    };
    let w = ThetaWindow::run(&start, steps)?;
    let mut consts = ConstCache::new(p, w.prec());
    let lo = match &c_big {
        ConstValue::Finite(c) => Some(c.sub(&cfg.tolerance)),
        ConstValue::Infinite => None,
    };
    let hi = match &c_l {
        ConstValue::Finite(c) => Some(c.add(&cfg.tolerance)),
        ConstValue::Infinite => None,
    };
    let first = if cfg.l == cfg.big_l { 0 } else { cfg.burn_in as i64 };
    let last = w.len() as i64 - 1;
    let post: Vec<Scalar> = (first..=last).map(|n| w.theta(n).clone()).collect();
    let (min_theta, max_theta) = min_max(&post);
    let mut rep = BoundsReport {
        params: p.to_string(),
        window: post.len(),
        min_theta,
        max_theta,
        gamma: w.gamma,
        liminf_estimate: Some(min_theta),
        limsup_estimate: Some(max_theta),
        c_small: Some(const_string(&c_l)),
        c_large: Some(const_string(&c_big)),
        ..BoundsReport::default()
    };
    for n in first..=last {
        let t = w.theta(n);
        rep.checked += 1;
        let below = match &lo {
            Some(lo) => t.compare(lo).map(|o| o == Ordering::Less),
            None => Ok(false),
        };
        let above = match &hi {
            Some(hi) => t.compare(hi).map(|o| o == Ordering::Greater),
            None => Ok(false),
        };
        match (below, above) {
            (Ok(false), Ok(false)) => {}
            (Ok(true), _) => rep.violations.push(Violation {
                n,
                kind: "below C_L",
                theta: t.to_string(),
                constant: const_string(&c_big),
            }),
            (_, Ok(true)) => rep.violations.push(Violation {
                n,
                kind: "above C_l",
                theta: t.to_string(),
                constant: const_string(&c_l),
            }),
            _ => rep.undecided += 1,
        }
    }
    if let ConstValue::Finite(c) = consts.get(cfg.l)? {
        let cf = c.to_f64();
        let idx: Vec<i64> = if designated.is_empty() {
            (first..=last).collect()
        } else {
            designated
        };
        rep.closest_to_c_small = idx
            .iter()
            .map(|&n| (w.theta(n).to_f64() - cf).abs())
            .min_by(|a, b| a.total_cmp(b));
    }
    rep.longest_monotone_run = Some(longest_monotone_run(&post));
    Ok(rep)
}

/// Length of the longest strictly monotone run, counted in terms.
pub fn longest_monotone_run(ts: &[Scalar]) -> usize {
    if ts.is_empty() {
        return 0;
    }
    let mut best = 1;
    let mut run = 1;
    let mut dir = Ordering::Equal;
    for pair in ts.windows(2) {
        let d = pair[1].compare(&pair[0]).unwrap_or(Ordering::Equal);
        if d != Ordering::Equal && d == dir {
            run += 1;
        } else if d != Ordering::Equal {
            run = 2;
        } else {
            run = 1;
        }
        dir = d;
        best = best.max(run);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::psi;
    use crate::expansion::apply_map;
    use crate::numerics::parse_scalar;
    use crate::DEFAULT_PREC;

    fn lit(s: &str) -> Scalar {
        parse_scalar(s, DEFAULT_PREC).unwrap()
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi(&Params::rational(0, 1, 1), 0).unwrap(), lit("(-1+√5)/2"));
        assert_eq!(xi(&Params::rational(1, 1, 1), 0).unwrap(), Scalar::zero());
        for p in [
            Params::rational(0, 1, 1),
            Params::rational(0, 3, 2),
            Params::rational(1, 2, 1),
        ] {
            for a in 0..4 {
                let x = xi(&p, a).unwrap();
                if x.is_zero_exact() {
                    continue;
                }
                assert_eq!(apply_map(&p, &x).unwrap(), (x.clone(), a), "{p} a={a}");
            }
        }
    }

    #[test]
    fn xi_solves_its_quadratic() {
        for p in [Params::rational(0, 2, 1), Params::rational(1, 3, 2)] {
            for a in 0..5u64 {
                let x = xi(&p, a).unwrap();
                let b = p.y_top().sub(&digit_scalar(a));
                let c = p
                    .m_scalar()
                    .mul(p.k())
                    .sub(p.k())
                    .sub(&p.m_scalar().mul(&digit_scalar(a)));
                assert!(x.mul(&x).sub(&b.mul(&x)).add(&c).is_zero_exact());
            }
        }
    }

    #[test]
    fn c_examples() {
        assert_eq!(
            c_const(&Params::rational(0, 1, 1), 0).unwrap().value,
            ConstValue::Finite(lit("√5/5"))
        );
        assert_eq!(
            c_const(&Params::rational(1, 1, 1), 0).unwrap().value,
            ConstValue::Infinite
        );
        assert_eq!(
            c_const(&Params::rational(0, 2, 1), 0).unwrap().value,
            ConstValue::Finite(lit("√3/6"))
        );
        assert_eq!(
            c_const(&Params::rational(0, 2, 1), 1).unwrap().value,
            ConstValue::Finite(lit("√17/17"))
        );
    }

    #[test]
    fn c_from_xi() {
        for p in [
            Params::rational(0, 1, 1),
            Params::rational(1, 3, 2),
            Params::rational(1, 2, 1),
        ] {
            for a in 0..4u64 {
                let x = xi(&p, a).unwrap();
                let den = x.mul_int(2).sub(&p.y_top().sub(&digit_scalar(a)));
                match c_const(&p, a).unwrap().value {
                    ConstValue::Finite(c) => assert_eq!(c, den.recip().unwrap()),
                    ConstValue::Infinite => assert!(den.is_zero_exact()),
                }
            }
        }
    }

    #[test]
    fn constant_pairs() {
        let p = Params::rational(0, 1, 1);
        let cp = constant_pair(&p, 0).unwrap();
        let c = lit("√5/5");
        assert_eq!(psi(&cp).unwrap(), JagerPair::new(c.clone(), c));
        for a in 0..3 {
            let cp = constant_pair(&p, a).unwrap();
            assert_eq!(cp.step().unwrap(), (cp.clone(), a));
        }
        assert!(matches!(
            constant_pair(&Params::rational(1, 2, 1), 0),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn constant_orbit_has_no_violations() {
        let p = Params::rational(0, 1, 1);
        let w = ThetaWindow::run(&constant_pair(&p, 0).unwrap(), 20).unwrap();
        let rep = triple_bound_report(&w).unwrap();
        assert!(rep.violations.is_empty());
        assert_eq!(rep.undecided, 0);
        let h = hurwitz_scan(&w).unwrap();
        assert_eq!(h.hits.len(), 20);
    }

    #[test]
    fn renyi_constant_case() {
        let p = Params::rational(1, 1, 1);
        let rep = renyi_bounds_experiment(&p, &RenyiConfig::new(1, 1, 50, DEFAULT_PREC)).unwrap();
        assert!(rep.violations.is_empty());
        assert_eq!(rep.closest_to_c_small, Some(0.0));
    }

    #[test]
    fn extremal_digit_layout() {
        assert_eq!(extremal_digits(1, 2, 9), vec![1, 2, 1, 2, 1, 1, 1, 2, 1]);
    }

    #[test]
    fn monotone_runs() {
        let ts: Vec<Scalar> = [1, 2, 3, 2, 1, 0, -1, 5].iter().map(|&v| Scalar::from(v)).collect();
        assert_eq!(longest_monotone_run(&ts), 5);
    }
}
