//! Randomised verification suites. Each seed is an independent task; results are merged
//! in seed order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::approx::{
    corollary_residual, extend_bac, gamma_check, psi, psi_inv, recover_digit, recover_digit_from_next, theta,
    theta_classical, CorollaryForm, Direction, GammaStatus, JagerPair,
};
use crate::error::{Error, Result};
use crate::expansion::Params;
use crate::natural_extension::{one_sided_start, DynamicPair};
use crate::numerics::{Rational, Scalar};
use crate::parallel::{map_indexed, Execution};
use crate::precision::{start_prec, with_retry};
use crate::sampling::{random_dyadic, random_small_rational, rng_for, SeedPair};
use crate::spectra::{
    birkhoff_digit_stats, c_const, constant_pair, hurwitz_scan, triple_bound_report, xi, ConstValue, DigitStats,
    GammaTally, HurwitzReport, ThetaWindow,
};

/// Violation descriptions kept per report.
const MAX_NOTES: usize = 10;
/// Denominator bound for exact-arithmetic seeds.
const SMALL_DEN: u64 = 1000;

/// The four parameter pairs the round-trip suites are run on.
pub fn standard_grid() -> Vec<Params> {
    vec![
        Params::rational(0, 1, 1),
        Params::rational(0, 2, 1),
        Params::rational(1, 1, 1),
        Params::rational(1, 3, 2),
    ]
}

/// Random bits for an exact `x` that keeps `steps` digits of a generic real.
pub fn seed_bits(steps: usize) -> u32 {
    16 * steps as u32 + 512
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    GaussTriple,
    RenyiExtrema,
    JagerRegion,
    Homeomorphism,
    ConstantBac,
    CorollaryIdentity,
    StepInverse,
    DigitRecovery,
    BacReconstruction,
    ClassicalTheta,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::GaussTriple,
        Suite::RenyiExtrema,
        Suite::JagerRegion,
        Suite::Homeomorphism,
        Suite::ConstantBac,
        Suite::CorollaryIdentity,
        Suite::StepInverse,
        Suite::DigitRecovery,
        Suite::BacReconstruction,
        Suite::ClassicalTheta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GaussTriple => "gauss-triple",
            Suite::RenyiExtrema => "renyi-extrema",
            Suite::JagerRegion => "jager-region",
            Suite::Homeomorphism => "homeomorphism",
            Suite::ConstantBac => "constant-bac",
            Suite::CorollaryIdentity => "corollary-identity",
            Suite::StepInverse => "step-inverse",
            Suite::DigitRecovery => "digit-recovery",
            Suite::BacReconstruction => "bac-reconstruction",
            Suite::ClassicalTheta => "classical-theta",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seeds: usize,
    pub window: usize,
    pub rng: u64,
    pub prec: u32,
    pub exec: Execution,
}

impl SuiteConfig {
    pub fn new(seeds: usize, window: usize, rng: u64) -> SuiteConfig {
        SuiteConfig {
            seeds,
            window,
            rng,
            prec: start_prec(),
            exec: Execution::default(),
        }
    }

    pub fn with_exec(mut self, exec: Execution) -> SuiteConfig {
        self.exec = exec;
        self
    }

    pub fn with_prec(mut self, prec: u32) -> SuiteConfig {
        self.prec = prec;
        self
    }
}

/// Counts from one seed, or from a whole suite once merged.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Tally {
    pub checks: usize,
    pub violations: usize,
    pub undecided: usize,
    pub skipped: usize,
    pub gamma: GammaTally,
    /// Largest certified residual bound seen, where the suite measures one.
    pub max_residual: Option<f64>,
    pub notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, note: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.notes.len() < MAX_NOTES {
                self.notes.push(note());
            }
        }
    }

    fn residual(&mut self, r: f64) {
        self.max_residual = Some(self.max_residual.map_or(r, |m| m.max(r)));
    }

    fn gamma_of(&mut self, p: &Params, jp: &JagerPair) {
        self.gamma.record(gamma_check(p, jp));
    }

    pub fn merge(&mut self, o: Tally) {
        self.checks += o.checks;
        self.violations += o.violations;
        self.undecided += o.undecided;
        self.skipped += o.skipped;
        self.gamma.merge(&o.gamma);
        if let Some(r) = o.max_residual {
            self.residual(r);
        }
        let room = MAX_NOTES.saturating_sub(self.notes.len());
        self.notes.extend(o.notes.into_iter().take(room));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub params: String,
    pub seeds: usize,
    pub window: usize,
    pub rng: u64,
    #[serde(flatten)]
    pub tally: Tally,
    pub summary: String,
}

impl SuiteReport {
    /// No violations, nothing left undecided, and Γ never certainly violated.
    pub fn passed(&self) -> bool {
        self.tally.violations == 0 && self.tally.undecided == 0 && self.tally.gamma.violated == 0
    }
}

/// `|a − b| < tol`, certified, with an upper bound on `|a − b|`.
fn within(a: &Scalar, b: &Scalar, tol: &Scalar) -> (bool, f64) {
    let d = a.sub(b);
    let upper = match &d {
        Scalar::Real(c) => Scalar::Rational(Rational(c.mid_rational().abs() + c.rad_rational())),
        exact => match exact.abs() {
            Ok(v) => v,
            Err(_) => return (false, f64::INFINITY),
        },
    };
    let ok = upper.compare(tol).is_ok_and(|o| o == Ordering::Less);
    (ok, upper.to_f64())
}

/// Fails with [`Error::PrecisionExhausted`] when the enclosure of `a − b` is too wide to
/// settle a comparison against `tol`.
fn within_certified(a: &Scalar, b: &Scalar, tol: &Scalar) -> Result<(bool, f64)> {
    let (ok, bound) = within(a, b, tol);
    let width = a.radius() + b.radius();
    if !ok && width * 2.0 >= tol.to_f64() {
        return Err(Error::PrecisionExhausted {
            prec: a.prec().or(b.prec()).unwrap_or(0),
        });
    }
    Ok((ok, bound))
}

/// `10^{−e}` as an exact rational.
pub fn tolerance(e: u32) -> Scalar {
    Scalar::Rational(Rational::new(1, BigInt::from(10).pow(e)).expect("non-zero"))
}

fn require_m(p: &Params, m: u8, suite: Suite) -> Result<()> {
    if p.m() != m {
        return Err(Error::InvalidParams(format!("{suite} needs m = {m}")));
    }
    Ok(())
}

pub fn run_suite(suite: Suite, p: &Params, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let window = match suite {
        Suite::BacReconstruction => 2 * BAC_HALF + 1,
        _ => cfg.window,
    };
    match suite {
        Suite::GaussTriple => require_m(p, 0, suite)?,
        Suite::RenyiExtrema => require_m(p, 1, suite)?,
        Suite::ClassicalTheta if *p.k() != Scalar::from(1) => {
            return Err(Error::InvalidParams(format!("{suite} needs k = 1")));
        }
        _ => {}
    }
    if cfg.window == 0 && !matches!(suite, Suite::BacReconstruction | Suite::ConstantBac) {
        return Err(Error::InvalidParams("window must be at least 1".into()));
    }
    let mut results = match suite {
        Suite::ConstantBac => vec![constant_bac(p, cfg.window)],
        _ => map_indexed(cfg.exec, cfg.seeds, |i| run_seed(suite, p, cfg, i as u64)),
    };
    if suite == Suite::CorollaryIdentity {
        results.push(corollary_on_constant_pairs(p));
    }
    let mut tally = Tally::default();
    for r in results {
        tally.merge(r?);
    }
    let summary = format!(
        "{}: {} checks, {} violations, {} undecided",
        suite, tally.checks, tally.violations, tally.undecided
    );
    Ok(SuiteReport {
        suite,
        params: p.to_string(),
        seeds: if suite == Suite::ConstantBac { 0 } else { cfg.seeds },
        window,
        rng: cfg.rng,
        tally,
        summary,
    })
}

fn run_seed(suite: Suite, p: &Params, cfg: &SuiteConfig, i: u64) -> Result<Tally> {
    let mut rng = rng_for(cfg.rng, i);
    match suite {
        Suite::GaussTriple | Suite::RenyiExtrema => {
            let pair = SeedPair::dyadic(&mut rng, seed_bits(cfg.window)).hybrid(p, cfg.prec)?;
            triple_bounds(&pair, cfg.window)
        }
        Suite::JagerRegion => {
            let pair = SeedPair::dyadic(&mut rng, seed_bits(cfg.window)).hybrid(p, cfg.prec)?;
            jager_region(&pair, cfg.window)
        }
        Suite::Homeomorphism => homeomorphism(p, &mut rng),
        Suite::StepInverse => {
            let pair = SeedPair::small(&mut rng, SMALL_DEN).exact(p)?;
            step_inverse(&pair)
        }
        Suite::DigitRecovery => {
            let seed = SeedPair::dyadic(&mut rng, seed_bits(cfg.window));
            with_retry(cfg.prec, |prec| digit_recovery(&seed.certified(p, prec)?, cfg.window))
        }
        Suite::BacReconstruction => {
            let seed = SeedPair::dyadic(&mut rng, seed_bits(2 * BAC_HALF + 1));
            with_retry(cfg.prec, |prec| bac_reconstruction(&seed.certified(p, prec)?))
        }
        Suite::CorollaryIdentity => {
            let seed = SeedPair::dyadic(&mut rng, seed_bits(cfg.window));
            with_retry(cfg.prec, |prec| {
                corollary_identity(&seed.certified(p, prec)?, cfg.window)
            })
        }
        Suite::ClassicalTheta => {
            let x = random_dyadic(&mut rng, seed_bits(cfg.window));
            classical_theta(p, &Scalar::Rational(x), cfg.window)
        }
        Suite::ConstantBac => constant_bac(p, cfg.window),
    }
}

fn triple_bounds(pair: &DynamicPair, window: usize) -> Result<Tally> {
    let w = ThetaWindow::run(pair, window)?;
    let rep = triple_bound_report(&w)?;
    let mut t = Tally {
        checks: rep.checked,
        violations: rep.violations.len(),
        undecided: rep.undecided,
        gamma: rep.gamma,
        ..Tally::default()
    };
    t.notes = rep
        .violations
        .iter()
        .take(MAX_NOTES)
        .map(|v| format!("n={} {}: θ={} C={}", v.n, v.kind, v.theta, v.constant))
        .collect();
    Ok(t)
}

fn jager_region(pair: &DynamicPair, window: usize) -> Result<Tally> {
    let mut t = Tally::default();
    let mut cur = pair.clone();
    for n in 0..window {
        let jp = psi(&cur)?;
        let status = gamma_check(pair.params(), &jp);
        t.gamma.record(status);
        t.check(status != GammaStatus::Violated, || {
            format!("n={n}: ({}, {}) outside Γ", jp.u, jp.v)
        });
        cur = cur.step()?.0;
    }
    Ok(t)
}

/// A random exact point of Γ by rejection: `(u, v)` with small denominators whose
/// preimage lies in Ω.
fn random_gamma_point(p: &Params, rng: &mut impl rand::Rng) -> Result<Option<(JagerPair, DynamicPair)>> {
    for _ in 0..64 {
        let scale = p.k().recip()?;
        let u = Scalar::Rational(random_small_rational(rng, SMALL_DEN)).mul(&scale);
        let v = Scalar::Rational(random_small_rational(rng, SMALL_DEN)).mul(&scale);
        let jp = JagerPair::new(u, v);
        match psi_inv(p, &jp) {
            Ok(pair) => return Ok(Some((jp, pair))),
            Err(Error::DegenerateOrbit(_) | Error::NegativeRadicand | Error::OutOfDomain(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn homeomorphism(p: &Params, rng: &mut impl rand::Rng) -> Result<Tally> {
    let mut t = Tally::default();
    let pair = SeedPair::small(rng, SMALL_DEN).exact(p)?;
    let jp = psi(&pair)?;
    t.gamma_of(p, &jp);
    let back = psi_inv(p, &jp)?;
    t.check(back == pair, || {
        format!("Ψ⁻¹Ψ({}, {}) = ({}, {})", pair.x(), pair.y(), back.x(), back.y())
    });
    match random_gamma_point(p, rng)? {
        Some((jp, pre)) => {
            let again = psi(&pre)?;
            t.gamma_of(p, &jp);
            t.check(again == jp, || {
                format!("ΨΨ⁻¹({}, {}) = ({}, {})", jp.u, jp.v, again.u, again.v)
            });
        }
        None => t.skipped += 1,
    }
    Ok(t)
}

fn step_inverse(pair: &DynamicPair) -> Result<Tally> {
    let mut t = Tally::default();
    let (next, a) = pair.step()?;
    let back = next.step_back(a)?;
    t.check(back == *pair, || {
        format!("𝒯⁻¹𝒯({}, {}) = ({}, {})", pair.x(), pair.y(), back.x(), back.y())
    });
    Ok(t)
}

fn digit_recovery(pair: &DynamicPair, window: usize) -> Result<Tally> {
    let p = pair.params();
    let mut t = Tally::default();
    let mut cur = pair.clone();
    let mut jp = psi(&cur)?;
    for n in 0..window {
        let (next, a) = cur.step()?;
        let jp_next = psi(&next)?;
        t.gamma_of(p, &jp);
        let r1 = recover_digit(p, &jp)?;
        let r2 = recover_digit_from_next(p, &jp_next)?;
        t.check(r1 == a && r2 == a, || format!("n={n}: a={a}, recovered {r1} and {r2}"));
        cur = next;
        jp = jp_next;
    }
    Ok(t)
}

/// Anchor and half-width of the reconstruction window `θ_{−1} … θ_{11}`.
const BAC_ANCHOR: i64 = 5;
const BAC_HALF: usize = 6;

fn bac_reconstruction(pair: &DynamicPair) -> Result<Tally> {
    let p = pair.params();
    let tol = tolerance(25);
    let steps = 2 * BAC_HALF;
    let w = ThetaWindow::run(pair, steps)?;
    let seed = JagerPair::new(w.theta(BAC_ANCHOR - 1).clone(), w.theta(BAC_ANCHOR).clone());
    let fwd = extend_bac(p, &seed, Direction::Forward, steps - BAC_ANCHOR as usize - 1)?;
    let bwd = extend_bac(p, &seed, Direction::Backward, BAC_ANCHOR as usize)?;
    if fwd.truncated || bwd.truncated {
        return Err(Error::PrecisionExhausted {
            prec: seed.u.prec().unwrap_or(0),
        });
    }
    let mut t = Tally::default();
    t.gamma.merge(&w.gamma);
    for e in fwd
        .shifted(BAC_ANCHOR)
        .entries
        .iter()
        .chain(&bwd.shifted(BAC_ANCHOR).entries)
    {
        let direct = w.theta(e.n);
        let (ok, bound) = within_certified(&e.theta, direct, &tol)?;
        t.residual(bound);
        t.check(ok, || {
            format!("n={}: reconstructed θ={} direct θ={}", e.n, e.theta, direct)
        });
        if let Some(a) = e.digit {
            if (1..=steps as i64).contains(&(e.n + 1)) {
                let direct = w.digit(e.n + 1);
                t.check(a == direct, || {
                    format!("n={}: reconstructed digit {a}, orbit digit {direct}", e.n + 1)
                });
            }
        }
    }
    Ok(t)
}

fn corollary_identity(pair: &DynamicPair, window: usize) -> Result<Tally> {
    let p = pair.params();
    let tol = tolerance(25);
    let w = ThetaWindow::run(pair, window.max(2))?;
    let mut t = Tally::default();
    t.gamma.merge(&w.gamma);
    for n in 0..w.len() as i64 - 1 {
        let thetas = [w.theta(n - 1), w.theta(n), w.theta(n + 1)];
        let a = w.digit(n + 1);
        let r = corollary_residual(p, thetas, a, CorollaryForm::Stated)?;
        let (ok, bound) = within_certified(&r, &Scalar::zero(), &tol)?;
        t.residual(bound);
        t.check(ok, || format!("n={n}: residual {r}"));
    }
    Ok(t)
}

/// Exact check of the identity on the constant pairs `a = 0..4`.
fn corollary_on_constant_pairs(p: &Params) -> Result<Tally> {
    let mut t = Tally::default();
    for a in 0..4 {
        let c = match c_const(p, a)?.value {
            ConstValue::Finite(c) => c,
            ConstValue::Infinite => {
                t.skipped += 1;
                continue;
            }
        };
        let r = corollary_residual(p, [&c, &c, &c], a, CorollaryForm::Stated)?;
        t.check(r.is_zero_exact(), || format!("a={a}: residual {r}"));
    }
    Ok(t)
}

fn classical_theta(p: &Params, x0: &Scalar, depth: usize) -> Result<Tally> {
    let tol = tolerance(30);
    let mut t = Tally::default();
    let (mut cur, _) = one_sided_start(p, x0)?;
    for n in 0..depth {
        let dynamic = theta(&cur)?;
        let classical = theta_classical(p, x0, n)?;
        let (ok, bound) = within(&classical, &dynamic, &tol);
        t.residual(bound);
        t.check(ok, || format!("n={n}: classical {classical}, dynamic {dynamic}"));
        cur = cur.step()?.0;
    }
    Ok(t)
}

/// The four equivalent descriptions of a constant BAC, for digits `0..4`.
fn constant_bac(p: &Params, window: usize) -> Result<Tally> {
    let mut t = Tally::default();
    let window = window.max(1);
    for a in 0..4u64 {
        let pair = match constant_pair(p, a) {
            Ok(pair) => pair,
            Err(Error::DegenerateInput(_)) => {
                t.skipped += 1;
                t.notes.push(format!("a={a}: ξ_{a} = 0, excluded"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let x = xi(p, a)?;
        t.check(*pair.x() == x, || format!("a={a}: x = {} ≠ ξ_a", pair.x()));
        let digits = pair.bi_digits(window)?;
        let constant_digits = digits.anchor == a && digits.forward.iter().chain(&digits.backward).all(|&d| d == a);
        t.check(constant_digits, || format!("a={a}: digit bi-sequence is not constant"));
        let c = c_const(p, a)?
            .value
            .finite()
            .cloned()
            .ok_or_else(|| Error::DegenerateInput(format!("C_{a} is infinite")))?;
        let jp = psi(&pair)?;
        t.gamma_of(p, &jp);
        t.check(jp == JagerPair::new(c.clone(), c.clone()), || {
            format!("a={a}: Ψ = ({}, {})", jp.u, jp.v)
        });
        t.check(theta(&pair)? == c, || format!("a={a}: θ ≠ C_a"));
        for dir in [Direction::Forward, Direction::Backward] {
            let w = extend_bac(p, &jp, dir, window)?;
            let ok = w.entries.iter().all(|e| e.theta == c && e.digit.is_none_or(|d| d == a));
            t.check(ok, || format!("a={a}: {dir:?} BAC leaves C_a"));
        }
        let (next, d) = pair.step()?;
        t.check(next == pair && d == a, || format!("a={a}: 𝒯 moves the constant pair"));
    }
    Ok(t)
}

/// Hurwitz scans of `n` steps from `seeds` random hybrid pairs.
pub fn hurwitz_batch(p: &Params, cfg: &SuiteConfig) -> Result<Vec<HurwitzReport>> {
    map_indexed(cfg.exec, cfg.seeds, |i| {
        let mut rng = rng_for(cfg.rng, i as u64);
        let pair = SeedPair::dyadic(&mut rng, seed_bits(cfg.window)).hybrid(p, cfg.prec)?;
        hurwitz_scan(&ThetaWindow::run(&pair, cfg.window)?)
    })
    .into_iter()
    .collect()
}

/// Birkhoff digit statistics of `n` digits from a random dyadic seed.
pub fn birkhoff_random(p: &Params, n: usize, rng: u64) -> Result<DigitStats> {
    let x = random_dyadic(&mut rng_for(rng, 0), 4 * n as u32 + 1024);
    birkhoff_digit_stats(p, &Scalar::Rational(x), n)
}
