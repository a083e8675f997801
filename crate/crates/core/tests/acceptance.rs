//! Acceptance criteria, one PASS/FAIL line each.
//!
//! A criterion fails when any of its checks fails. Checks listed as known defects are
//! reported as failures but do not change the exit status; every other failing check does.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mkcf_core::approx::{corollary_residual, psi, CorollaryForm, JagerPair};
use mkcf_core::expansion::{evaluate_finite, expand};
use mkcf_core::numerics::parse_scalar;
use mkcf_core::spectra::{c_const, constant_pair, renyi_bounds_experiment, ConstValue, GammaTally, RenyiConfig};
use mkcf_core::suites::{birkhoff_random, hurwitz_batch, run_suite, standard_grid, Suite, SuiteConfig, SuiteReport};
use mkcf_core::{Params, Scalar, DEFAULT_PREC};

struct Check {
    label: String,
    ok: bool,
    known_defect: bool,
    detail: String,
}

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<Check>,
    limit: Option<Duration>,
    elapsed: Duration,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Criterion {
        Criterion {
            id,
            title,
            checks: Vec::new(),
            limit: None,
            elapsed: Duration::ZERO,
        }
    }

    fn limit(mut self, secs: u64) -> Criterion {
        self.limit = Some(Duration::from_secs(secs));
        self
    }

    fn check(&mut self, label: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            ok,
            known_defect: false,
            detail: detail.into(),
        });
    }

    fn known_defect(&mut self, label: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            ok,
            known_defect: true,
            detail: detail.into(),
        });
    }

    fn suite(&mut self, r: &SuiteReport) {
        self.check(format!("{} {}", r.suite, r.params), r.passed(), suite_detail(r));
    }

    fn timed(mut self, body: impl FnOnce(&mut Criterion)) -> Criterion {
        let t = Instant::now();
        body(&mut self);
        self.elapsed = t.elapsed();
        if let Some(limit) = self.limit {
            let ok = self.elapsed < limit;
            let detail = format!("{:.2?} (limit {:?})", self.elapsed, limit);
            self.check("runtime", ok, detail);
        }
        self
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    fn unexpected_failure(&self) -> bool {
        self.checks.iter().any(|c| !c.ok && !c.known_defect)
    }

    fn print(&self) {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {:>2}: {} [{:.2?}]",
            self.id, self.title, self.elapsed
        );
        for c in &self.checks {
            if !c.ok || std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
                let tag = match (c.ok, c.known_defect) {
                    (true, _) => "ok",
                    (false, true) => "fail (known defect)",
                    (false, false) => "fail",
                };
                println!("      {tag}: {}: {}", c.label, c.detail);
            }
        }
    }
}

fn suite_detail(r: &SuiteReport) -> String {
    let mut s = r.summary.clone();
    if let Some(res) = r.tally.max_residual {
        s.push_str(&format!(", max residual {res:.3e}"));
    }
    if r.tally.gamma.violated > 0 {
        s.push_str(&format!(", Γ violated {}", r.tally.gamma.violated));
    }
    if let Some(n) = r.tally.notes.first() {
        let n: String = n.chars().take(160).collect();
        s.push_str(&format!("; first: {n}"));
    }
    s
}

fn lit(s: &str) -> Scalar {
    parse_scalar(s, DEFAULT_PREC).expect("literal")
}

fn cfg(seeds: usize, window: usize, rng: u64) -> SuiteConfig {
    SuiteConfig::new(seeds, window, rng).with_prec(DEFAULT_PREC)
}

fn suite_or_error(c: &mut Criterion, suite: Suite, p: &Params, config: &SuiteConfig) -> Option<SuiteReport> {
    match run_suite(suite, p, config) {
        Ok(r) => {
            c.suite(&r);
            Some(r)
        }
        Err(e) => {
            c.check(format!("{suite} {p}"), false, format!("error: {e}"));
            None
        }
    }
}

fn criterion_1() -> Criterion {
    Criterion::new(1, "worked fractions").limit(1).timed(|c| {
        for (m, want) in [(0, "7/10"), (1, "5/13")] {
            let p = Params::rational(m, 1, 1);
            let got = evaluate_finite(&p, &[0, 1, 2]);
            let ok = got.as_ref().is_ok_and(|v| *v == lit(want));
            c.check(format!("eval [0,1,2] {p}"), ok, format!("{got:?}, want {want}"));
        }
        for (m, want) in [(0, vec![0u64, 0, 1]), (1, vec![1, 1])] {
            let p = Params::rational(m, 1, 1);
            let got = expand(&p, &lit("3/5"), 100).map(|e| e.digits);
            let ok = got.as_ref().is_ok_and(|d| *d == want);
            c.check(format!("expand 3/5 {p}"), ok, format!("{got:?}, want {want:?}"));
        }
    })
}

fn criterion_2() -> Criterion {
    Criterion::new(2, "homeomorphism round trip").limit(10).timed(|c| {
        for p in standard_grid() {
            suite_or_error(c, Suite::Homeomorphism, &p, &cfg(1000, 1, 2));
        }
    })
}

fn criterion_3() -> Criterion {
    Criterion::new(3, "natural-extension inverse").limit(10).timed(|c| {
        for p in standard_grid() {
            suite_or_error(c, Suite::StepInverse, &p, &cfg(1000, 1, 3));
        }
    })
}

fn criterion_4(gamma: &mut GammaTally) -> Criterion {
    Criterion::new(4, "digit recovery").timed(|c| {
        for p in standard_grid() {
            if let Some(r) = suite_or_error(c, Suite::DigitRecovery, &p, &cfg(100, 100, 4)) {
                gamma.merge(&r.tally.gamma);
            }
        }
    })
}

fn criterion_5(gamma: &mut GammaTally) -> Criterion {
    Criterion::new(5, "BAC reconstruction").timed(|c| {
        for p in standard_grid() {
            if let Some(r) = suite_or_error(c, Suite::BacReconstruction, &p, &cfg(100, 13, 5)) {
                gamma.merge(&r.tally.gamma);
            }
        }
    })
}

fn criterion_6(gamma: &mut GammaTally) -> Criterion {
    Criterion::new(6, "digit-discriminant identity").timed(|c| {
        for p in standard_grid() {
            let r = match run_suite(Suite::CorollaryIdentity, &p, &cfg(100, 100, 6)) {
                Ok(r) => r,
                Err(e) => {
                    c.check(format!("corollary-identity {p}"), false, format!("error: {e}"));
                    continue;
                }
            };
            gamma.merge(&r.tally.gamma);
            if p.m() == 0 {
                c.suite(&r);
            } else {
                c.known_defect(format!("{} {}", r.suite, r.params), r.passed(), suite_detail(&r));
                // the sign-free normalisation on the same constant pairs
                let mut worst = Scalar::zero();
                let mut exact = true;
                for a in 0..4 {
                    if let ConstValue::Finite(k) = c_const(&p, a).expect("constant").value {
                        let r = corollary_residual(&p, [&k, &k, &k], a, CorollaryForm::Corrected).expect("residual");
                        exact &= r.is_zero_exact();
                        worst = if r.to_f64().abs() > worst.to_f64().abs() {
                            r
                        } else {
                            worst
                        };
                    }
                }
                c.check(
                    format!("corrected normalisation on constant pairs {p}"),
                    exact,
                    format!("worst residual {worst}"),
                );
            }
        }
    })
}

fn criterion_7(gamma: &mut GammaTally) -> Criterion {
    Criterion::new(7, "constant BAC").timed(|c| {
        for p in standard_grid() {
            if let Some(r) = suite_or_error(c, Suite::ConstantBac, &p, &cfg(0, 100, 7)) {
                gamma.merge(&r.tally.gamma);
            }
            for a in 0..4 {
                let Ok(pair) = constant_pair(&p, a) else { continue };
                let Some(k) = c_const(&p, a).expect("constant").value.finite().cloned() else {
                    continue;
                };
                let got = psi(&pair);
                let ok = got.as_ref().is_ok_and(|jp| *jp == JagerPair::new(k.clone(), k.clone()))
                    && matches!(&k, Scalar::Surd(_) | Scalar::Rational(_));
                c.check(format!("Ψ(constant pair) {p} a={a}"), ok, format!("{got:?}"));
            }
        }
    })
}

fn criterion_8(gamma: &mut GammaTally) -> Criterion {
    Criterion::new(8, "Hurwitz scan").limit(60).timed(|c| {
        let p = Params::rational(0, 1, 1);
        let c0 = c_const(&p, 0).expect("constant").value;
        c.check("C_0 = 1/√5", c0 == ConstValue::Finite(lit("√5/5")), format!("{c0:?}"));
        let n = 10_000;
        match hurwitz_batch(&p, &cfg(10, n, 8)) {
            Ok(reports) => {
                let need = n / 3 - 1;
                for (i, r) in reports.iter().enumerate() {
                    let ok = r.hits.len() >= need && r.undecided == 0;
                    c.check(
                        format!("seed {i}"),
                        ok,
                        format!("{} hits, need {need}, {} undecided", r.hits.len(), r.undecided),
                    );
                }
                for r in &reports {
                    gamma.merge(&r.gamma);
                }
            }
            Err(e) => c.check("scan", false, format!("error: {e}")),
        }
    })
}

fn criterion_9(gamma: &mut GammaTally) -> Criterion {
    Criterion::new(9, "Gauss triple bounds").timed(|c| {
        for k in [1, 2] {
            let p = Params::rational(0, k, 1);
            if let Some(r) = suite_or_error(c, Suite::GaussTriple, &p, &cfg(100, 1000, 9)) {
                gamma.merge(&r.tally.gamma);
            }
        }
    })
}

fn criterion_10(gamma: &mut GammaTally) -> Criterion {
    Criterion::new(10, "Renyi extrema lemma").timed(|c| {
        for (kp, kq) in [(1, 1), (3, 2)] {
            let p = Params::rational(1, kp, kq);
            if let Some(r) = suite_or_error(c, Suite::RenyiExtrema, &p, &cfg(100, 1000, 10)) {
                gamma.merge(&r.tally.gamma);
            }
        }
    })
}

fn criterion_11(gamma: &mut GammaTally) -> Criterion {
    Criterion::new(11, "Renyi bounds construction").timed(|c| {
        let p = Params::rational(1, 1, 1);
        match renyi_bounds_experiment(&p, &RenyiConfig::new(1, 2, 1 << 14, DEFAULT_PREC)) {
            Ok(r) => {
                gamma.merge(&r.gamma);
                let range_ok = r.violations.is_empty() && r.undecided == 0;
                c.check(
                    "θ within [C_2 − 1e-6, C_1 + 1e-6]",
                    range_ok,
                    format!(
                        "{} terms, θ ∈ [{:.9}, {:.9}], {} violations, {} undecided",
                        r.checked,
                        r.min_theta,
                        r.max_theta,
                        r.violations.len(),
                        r.undecided
                    ),
                );
                let close = r.closest_to_c_small.unwrap_or(f64::INFINITY);
                c.check(
                    "min |θ − C_1| < 0.01 on designated subsequence",
                    close < 0.01,
                    format!("{close:.3e}"),
                );
                let run = r.longest_monotone_run.unwrap_or(usize::MAX);
                c.check(
                    "no strictly monotone run of 100 terms",
                    run < 100,
                    format!("longest run {run}"),
                );
            }
            Err(e) => c.check("experiment", false, format!("error: {e}")),
        }
    })
}

fn criterion_12(gamma: &GammaTally) -> Criterion {
    Criterion::new(12, "Jager region").timed(|c| {
        c.check(
            "Γ at every pair from criteria 4-11",
            gamma.violated == 0 && gamma.total() > 0,
            format!(
                "{} holds, {} within radius, {} violated",
                gamma.holds, gamma.consistent, gamma.violated
            ),
        );
    })
}

fn criterion_13() -> Criterion {
    Criterion::new(13, "classical θ cross-check").timed(|c| {
        for m in [0, 1] {
            let p = Params::rational(m, 1, 1);
            match run_suite(Suite::ClassicalTheta, &p, &cfg(100, 50, 13)) {
                Ok(r) if m == 0 => c.suite(&r),
                Ok(r) => c.known_defect(format!("{} {}", r.suite, r.params), r.passed(), suite_detail(&r)),
                Err(e) => c.check(format!("classical-theta {p}"), false, format!("error: {e}")),
            }
        }
    })
}

fn criterion_14() -> Criterion {
    Criterion::new(14, "Birkhoff digit statistic").limit(60).timed(|c| {
        let p = Params::rational(0, 1, 1);
        let model = (4.0f64 / 3.0).log2();
        // statistical: one rerun with a fresh seed on failure
        for (attempt, rng) in [14u64, 1014].into_iter().enumerate() {
            match birkhoff_random(&p, 100_000, rng) {
                Ok(s) => {
                    let emp = s.empirical(0).unwrap_or(f64::NAN);
                    let ok = (emp - model).abs() < 0.02;
                    let detail = format!("empirical {emp:.5}, model {model:.5}, rng {rng}");
                    if ok || attempt == 1 {
                        c.check("P(a=0)", ok, detail);
                        break;
                    }
                }
                Err(e) => {
                    c.check("P(a=0)", false, format!("error: {e}"));
                    break;
                }
            }
        }
    })
}

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let run = |id: u32| wanted.is_empty() || wanted.contains(&id);
    let mut gamma = GammaTally::default();
    let mut all = Vec::new();
    let mut go = |id: u32, f: &mut dyn FnMut(&mut GammaTally) -> Criterion| {
        if run(id) {
            let c = f(&mut gamma);
            c.print();
            all.push(c);
        }
    };
    go(1, &mut |_| criterion_1());
    go(2, &mut |_| criterion_2());
    go(3, &mut |_| criterion_3());
    go(4, &mut criterion_4);
    go(5, &mut criterion_5);
    go(6, &mut criterion_6);
    go(7, &mut criterion_7);
    go(8, &mut criterion_8);
    go(9, &mut criterion_9);
    go(10, &mut criterion_10);
    go(11, &mut criterion_11);
    go(12, &mut |g| criterion_12(g));
    go(13, &mut |_| criterion_13());
    go(14, &mut |_| criterion_14());
    let passed = all.iter().filter(|c| c.passed()).count();
    println!("{passed}/{} criteria passed", all.len());
    if all.iter().any(Criterion::unexpected_failure) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
