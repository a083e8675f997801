use serde::Serialize;

use mkcf_core::approx::{extend_bac, recover_digit, recover_digit_from_next, theta, Direction, JagerPair};
use mkcf_core::expansion::{convergents, evaluate_with_tail, expand, Status};
use mkcf_core::natural_extension::DynamicPair;
use mkcf_core::parallel::map_indexed;
use mkcf_core::precision::{start_prec, PRECISION_ENV};
use mkcf_core::sampling::{rng_for, SeedPair};
use mkcf_core::spectra::{
    birkhoff_digit_stats, c_const, renyi_bounds_experiment, xi, BoundsReport, ConstValue, DigitStats, HurwitzReport,
    RenyiConfig, ThetaWindow,
};
use mkcf_core::suites::{birkhoff_random, hurwitz_batch, run_suite, seed_bits, Suite, SuiteConfig, SuiteReport};
use mkcf_core::{parse_scalar, Error, Params, Scalar, MAX_PREC};

use crate::output::{emit, Format, Table};
use crate::{BatchArgs, Cli, Command, DirectionArg, Failure, ParamArgs, ScanCommand, StatsCommand};

struct Ctx {
    format: Format,
    prec: u32,
}

impl Ctx {
    fn lit(&self, flag: &str, src: &str) -> Result<Scalar, Failure> {
        parse_scalar(src, self.prec).map_err(|e| Failure::Usage(format!("{flag}: {e}")))
    }

    fn params(&self, a: &ParamArgs) -> Result<Params, Failure> {
        let k = self.lit("--k", &a.k)?;
        Params::new(a.m, k).map_err(|e| Failure::Usage(format!("--k: {e}")))
    }

    fn suite_config(&self, b: &BatchArgs) -> SuiteConfig {
        SuiteConfig::new(b.seeds as usize, b.window as usize, b.rng).with_prec(self.prec)
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    if let Ok(v) = std::env::var(PRECISION_ENV) {
        if !v.trim().parse::<u32>().is_ok_and(|p| (64..=MAX_PREC).contains(&p)) {
            return Err(Failure::Usage(format!(
                "{PRECISION_ENV}: expected an integer in 64..={MAX_PREC}, got '{v}'"
            )));
        }
    }
    let ctx = Ctx {
        format: cli.format,
        prec: cli.prec.unwrap_or_else(start_prec),
    };
    match cli.command {
        Command::Expand {
            params,
            seed,
            steps,
            classical_digits,
        } => expand_cmd(&ctx, &params, &seed, steps as usize, classical_digits),
        Command::Eval {
            params,
            digits,
            tail,
            classical_digits,
        } => eval_cmd(&ctx, &params, &digits, tail.as_deref(), classical_digits),
        Command::Convergents {
            params,
            digits,
            seed,
            steps,
            classical_digits,
        } => convergents_cmd(
            &ctx,
            &params,
            &digits,
            seed.as_deref(),
            steps as usize,
            classical_digits,
        ),
        Command::Orbit { params, x, y, steps } => orbit_cmd(&ctx, &params, &x, &y, steps as usize),
        Command::Bac {
            params,
            u,
            v,
            steps,
            direction,
        } => bac_cmd(&ctx, &params, &u, &v, steps as usize, direction),
        Command::RecoverDigit {
            params,
            u,
            v,
            from_next,
        } => recover_cmd(&ctx, &params, &u, &v, from_next),
        Command::Constants { params, max_digit } => constants_cmd(&ctx, &params, max_digit),
        Command::Verify { suite, params, batch } => verify_cmd(&ctx, &suite, &params, &batch),
        Command::Scan(ScanCommand::Hurwitz { params, batch }) => hurwitz_cmd(&ctx, &params, &batch),
        Command::Scan(ScanCommand::RenyiBounds {
            params,
            l,
            big_l,
            depth,
        }) => renyi_cmd(&ctx, &params, l, big_l, depth as usize),
        Command::Stats(StatsCommand::Birkhoff { params, n, seed, rng }) => {
            birkhoff_cmd(&ctx, &params, n as usize, seed.as_deref(), rng)
        }
        Command::Stats(StatsCommand::Histogram { params, batch, bins }) => {
            histogram_cmd(&ctx, &params, &batch, bins as usize)
        }
    }
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_string).collect()
}

fn from_classical(digits: &[u64], classical: bool) -> Result<Vec<u64>, Failure> {
    if !classical {
        return Ok(digits.to_vec());
    }
    digits
        .iter()
        .map(|&d| {
            d.checked_sub(1)
                .ok_or_else(|| Failure::Usage("--digits: classical partial quotients are ≥ 1".into()))
        })
        .collect()
}

fn to_classical(digits: &[u64], classical: bool) -> Vec<u64> {
    digits.iter().map(|&d| if classical { d + 1 } else { d }).collect()
}

#[derive(Serialize)]
struct ExpandOut {
    params: String,
    seed: String,
    digits: Vec<u64>,
    classical_digits: bool,
    #[serde(flatten)]
    status: Status,
    futures: Vec<String>,
}

fn expand_cmd(ctx: &Ctx, pa: &ParamArgs, seed: &str, steps: usize, classical: bool) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let x = ctx.lit("--seed", seed)?;
    let e = expand(&p, &x, steps)?;
    let out = ExpandOut {
        params: p.to_string(),
        seed: x.to_string(),
        digits: to_classical(&e.digits, classical),
        classical_digits: classical,
        status: e.status,
        futures: strings(&e.futures),
    };
    Ok(emit(ctx.format, &out, || {
        let mut t = Table::new(&["n", "digit", "future"]);
        for (i, f) in out.futures.iter().enumerate() {
            let d = if i == 0 {
                String::new()
            } else {
                out.digits[i - 1].to_string()
            };
            t.row(vec![i.to_string(), d, f.clone()]);
        }
        t
    })?)
}

#[derive(Serialize)]
struct EvalOut {
    params: String,
    digits: Vec<u64>,
    tail: String,
    value: String,
}

fn eval_cmd(ctx: &Ctx, pa: &ParamArgs, digits: &[u64], tail: Option<&str>, classical: bool) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let digits = from_classical(digits, classical)?;
    let tail = match tail {
        Some(t) => ctx.lit("--tail", t)?,
        None => Scalar::zero(),
    };
    let v = evaluate_with_tail(&p, &digits, &tail)?;
    let out = EvalOut {
        params: p.to_string(),
        digits,
        tail: tail.to_string(),
        value: v.to_string(),
    };
    Ok(emit(ctx.format, &out, || {
        let mut t = Table::new(&["value"]);
        t.row(vec![out.value.clone()]);
        t
    })?)
}

#[derive(Serialize)]
struct ConvergentRow {
    n: usize,
    p: String,
    q: String,
    value: String,
}

#[derive(Serialize)]
struct ConvergentsOut {
    params: String,
    digits: Vec<u64>,
    convergents: Vec<ConvergentRow>,
}

fn convergents_cmd(
    ctx: &Ctx,
    pa: &ParamArgs,
    digits: &[u64],
    seed: Option<&str>,
    steps: usize,
    classical: bool,
) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let digits = match seed {
        Some(s) => expand(&p, &ctx.lit("--seed", s)?, steps)?.digits,
        None => from_classical(digits, classical)?,
    };
    let rows = convergents(&p, &digits)?
        .into_iter()
        .map(|c| {
            Ok(ConvergentRow {
                n: c.index,
                value: c.value()?.to_string(),
                p: c.p.to_string(),
                q: c.q.to_string(),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let out = ConvergentsOut {
        params: p.to_string(),
        digits,
        convergents: rows,
    };
    Ok(emit(ctx.format, &out, || {
        let mut t = Table::new(&["n", "p", "q", "value"]);
        for r in &out.convergents {
            t.row(vec![r.n.to_string(), r.p.clone(), r.q.clone(), r.value.clone()]);
        }
        t
    })?)
}

#[derive(Serialize)]
struct OrbitRow {
    n: usize,
    digit: Option<u64>,
    x: String,
    y: String,
    /// `θ_{n−1}`
    theta: String,
}

#[derive(Serialize)]
struct OrbitOut {
    params: String,
    orbit: Vec<OrbitRow>,
}

fn orbit_cmd(ctx: &Ctx, pa: &ParamArgs, x: &str, y: &str, steps: usize) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let pair = DynamicPair::new(&p, ctx.lit("--x", x)?, ctx.lit("--y", y)?)?;
    let mut rows = vec![OrbitRow {
        n: 0,
        digit: None,
        x: pair.x().to_string(),
        y: pair.y().to_string(),
        theta: theta(&pair).map(|t| t.to_string()).unwrap_or_else(|_| "inf".into()),
    }];
    for (i, step) in pair.orbit().take(steps).enumerate() {
        let (q, a) = step?;
        rows.push(OrbitRow {
            n: i + 1,
            digit: Some(a),
            x: q.x().to_string(),
            y: q.y().to_string(),
            theta: theta(&q).map(|t| t.to_string()).unwrap_or_else(|_| "inf".into()),
        });
    }
    let out = OrbitOut {
        params: p.to_string(),
        orbit: rows,
    };
    Ok(emit(ctx.format, &out, || {
        let mut t = Table::new(&["n", "x_n", "y_n", "a_n", "theta_prev"]);
        for r in &out.orbit {
            let d = r.digit.map(|d| d.to_string()).unwrap_or_default();
            t.row(vec![r.n.to_string(), r.x.clone(), r.y.clone(), d, r.theta.clone()]);
        }
        t
    })?)
}

#[derive(Serialize)]
struct BacOut {
    n: Vec<i64>,
    theta: Vec<String>,
    digit: Vec<Option<u64>>,
    seed_pair: [String; 2],
    direction: Direction,
    truncated: bool,
}

fn bac_cmd(ctx: &Ctx, pa: &ParamArgs, u: &str, v: &str, steps: usize, dir: DirectionArg) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let seed = JagerPair::new(ctx.lit("--u", u)?, ctx.lit("--v", v)?);
    let direction = match dir {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
    };
    let w = extend_bac(&p, &seed, direction, steps)?;
    let out = BacOut {
        n: w.entries.iter().map(|e| e.n).collect(),
        theta: w.entries.iter().map(|e| e.theta.to_string()).collect(),
        digit: w.entries.iter().map(|e| e.digit).collect(),
        seed_pair: [seed.u.to_string(), seed.v.to_string()],
        direction,
        truncated: w.truncated,
    };
    Ok(emit(ctx.format, &out, || {
        let mut t = Table::new(&["n", "theta", "digit"]);
        for i in 0..out.n.len() {
            let d = out.digit[i].map(|d| d.to_string()).unwrap_or_default();
            t.row(vec![out.n[i].to_string(), out.theta[i].clone(), d]);
        }
        t
    })?)
}

#[derive(Serialize)]
struct RecoverOut {
    params: String,
    u: String,
    v: String,
    from_next: bool,
    digit: u64,
}

fn recover_cmd(ctx: &Ctx, pa: &ParamArgs, u: &str, v: &str, from_next: bool) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let jp = JagerPair::new(ctx.lit("--u", u)?, ctx.lit("--v", v)?);
    let digit = if from_next {
        recover_digit_from_next(&p, &jp)?
    } else {
        recover_digit(&p, &jp)?
    };
    let out = RecoverOut {
        params: p.to_string(),
        u: jp.u.to_string(),
        v: jp.v.to_string(),
        from_next,
        digit,
    };
    Ok(emit(ctx.format, &out, || {
        let mut t = Table::new(&["digit"]);
        t.row(vec![digit.to_string()]);
        t
    })?)
}

#[derive(Serialize)]
struct ConstantRow {
    a: u64,
    xi: String,
    c: String,
    xi_approx: f64,
    c_approx: Option<f64>,
}

#[derive(Serialize)]
struct ConstantsOut {
    params: String,
    constants: Vec<ConstantRow>,
}

fn constants_cmd(ctx: &Ctx, pa: &ParamArgs, max_digit: u64) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let mut rows = Vec::new();
    for a in 0..=max_digit {
        let x = xi(&p, a)?;
        let c = c_const(&p, a)?.value;
        rows.push(ConstantRow {
            a,
            xi: x.to_string(),
            xi_approx: x.to_f64(),
            c: match &c {
                ConstValue::Finite(v) => v.to_string(),
                ConstValue::Infinite => "inf".into(),
            },
            c_approx: c.finite().map(Scalar::to_f64),
        });
    }
    let out = ConstantsOut {
        params: p.to_string(),
        constants: rows,
    };
    Ok(emit(ctx.format, &out, || {
        let mut t = Table::new(&["a", "xi", "c", "xi_approx", "c_approx"]);
        for r in &out.constants {
            let ca = r.c_approx.map(|v| v.to_string()).unwrap_or_else(|| "inf".into());
            t.row(vec![
                r.a.to_string(),
                r.xi.clone(),
                r.c.clone(),
                r.xi_approx.to_string(),
                ca,
            ]);
        }
        t
    })?)
}

fn verify_cmd(ctx: &Ctx, suite: &str, pa: &ParamArgs, batch: &BatchArgs) -> Result<(), Failure> {
    let suite: Suite = suite.parse().map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        Failure::Usage(format!(
            "--suite: unknown suite '{suite}' (expected one of {})",
            names.join(", ")
        ))
    })?;
    let p = ctx.params(pa)?;
    let r = run_suite(suite, &p, &ctx.suite_config(batch))?;
    emit(ctx.format, &r, || suite_table(&r))?;
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn suite_table(r: &SuiteReport) -> Table {
    let mut t = Table::new(&[
        "suite",
        "params",
        "seeds",
        "window",
        "rng",
        "checks",
        "violations",
        "undecided",
        "skipped",
        "gamma_holds",
        "gamma_consistent",
        "gamma_violated",
        "max_residual",
        "summary",
    ]);
    let g = &r.tally.gamma;
    t.row(vec![
        r.suite.to_string(),
        r.params.clone(),
        r.seeds.to_string(),
        r.window.to_string(),
        r.rng.to_string(),
        r.tally.checks.to_string(),
        r.tally.violations.to_string(),
        r.tally.undecided.to_string(),
        r.tally.skipped.to_string(),
        g.holds.to_string(),
        g.consistent.to_string(),
        g.violated.to_string(),
        r.tally.max_residual.map(|v| v.to_string()).unwrap_or_default(),
        r.summary.clone(),
    ]);
    t
}

#[derive(Serialize)]
struct HurwitzOut {
    params: String,
    rng: u64,
    seeds: Vec<HurwitzReport>,
    summary: String,
}

fn hurwitz_cmd(ctx: &Ctx, pa: &ParamArgs, batch: &BatchArgs) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let reports = hurwitz_batch(&p, &ctx.suite_config(batch))?;
    let short = reports
        .iter()
        .filter(|r| r.hits.len() < r.required || r.undecided > 0)
        .count();
    let out = HurwitzOut {
        params: p.to_string(),
        rng: batch.rng,
        summary: format!("{} seeds, {short} violations", reports.len()),
        seeds: reports,
    };
    emit(ctx.format, &out, || {
        let mut t = Table::new(&["seed", "n", "hits", "required", "undecided", "constant"]);
        for (i, r) in out.seeds.iter().enumerate() {
            t.row(vec![
                i.to_string(),
                r.n.to_string(),
                r.hits.len().to_string(),
                r.required.to_string(),
                r.undecided.to_string(),
                r.constant.clone(),
            ]);
        }
        t
    })?;
    if short == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn bounds_table(r: &BoundsReport) -> Table {
    let mut t = Table::new(&["n", "kind", "theta", "constant"]);
    for v in &r.violations {
        t.row(vec![
            v.n.to_string(),
            v.kind.to_string(),
            v.theta.clone(),
            v.constant.clone(),
        ]);
    }
    t
}

fn renyi_cmd(ctx: &Ctx, pa: &ParamArgs, l: u64, big_l: u64, depth: usize) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let r = renyi_bounds_experiment(&p, &RenyiConfig::new(l, big_l, depth, ctx.prec))?;
    if ctx.format == Format::Csv && r.violations.is_empty() {
        emit(ctx.format, &r, || {
            let mut t = Table::new(&[
                "checked",
                "min_theta",
                "max_theta",
                "c_small",
                "c_large",
                "closest_to_c_small",
            ]);
            t.row(vec![
                r.checked.to_string(),
                r.min_theta.to_string(),
                r.max_theta.to_string(),
                r.c_small.clone().unwrap_or_default(),
                r.c_large.clone().unwrap_or_default(),
                r.closest_to_c_small.map(|v| v.to_string()).unwrap_or_default(),
            ]);
            t
        })?;
    } else {
        emit(ctx.format, &r, || bounds_table(&r))?;
    }
    if r.violations.is_empty() && r.undecided == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn stats_table(s: &DigitStats) -> Table {
    let mut t = Table::new(&["digit", "count", "empirical", "model"]);
    for f in &s.table {
        let d = if f.overflow {
            format!("{}+", f.digit)
        } else {
            f.digit.to_string()
        };
        let m = f.model.map(|v| v.to_string()).unwrap_or_default();
        t.row(vec![d, f.count.to_string(), f.empirical.to_string(), m]);
    }
    t
}

fn birkhoff_cmd(ctx: &Ctx, pa: &ParamArgs, n: usize, seed: Option<&str>, rng: u64) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let s = match seed {
        Some(src) => birkhoff_digit_stats(&p, &ctx.lit("--seed", src)?, n)?,
        None => birkhoff_random(&p, n, rng)?,
    };
    Ok(emit(ctx.format, &s, || stats_table(&s))?)
}

#[derive(Serialize)]
struct HistogramOut {
    params: String,
    samples: usize,
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
}

fn histogram_cmd(ctx: &Ctx, pa: &ParamArgs, batch: &BatchArgs, bins: usize) -> Result<(), Failure> {
    let p = ctx.params(pa)?;
    let cfg = ctx.suite_config(batch);
    let thetas: Vec<Vec<f64>> = map_indexed(cfg.exec, cfg.seeds, |i| {
        let mut rng = rng_for(cfg.rng, i as u64);
        let pair = SeedPair::dyadic(&mut rng, seed_bits(cfg.window)).hybrid(&p, cfg.prec)?;
        Ok::<_, Error>(
            ThetaWindow::run(&pair, cfg.window)?
                .thetas
                .iter()
                .map(Scalar::to_f64)
                .collect(),
        )
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let all: Vec<f64> = thetas.into_iter().flatten().collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for t in &all {
        let b = if width > 0.0 { ((t - lo) / width) as usize } else { 0 };
        counts[b.min(bins - 1)] += 1;
    }
    let out = HistogramOut {
        params: p.to_string(),
        samples: all.len(),
        lo,
        hi,
        counts,
    };
    Ok(emit(ctx.format, &out, || {
        let mut t = Table::new(&["bin_lo", "bin_hi", "count"]);
        for (i, c) in out.counts.iter().enumerate() {
            let a = lo + width * i as f64;
            t.row(vec![a.to_string(), (a + width).to_string(), c.to_string()]);
        }
        t
    })?)
}
