use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mkcf_core::parallel::Execution;
use mkcf_core::suites::{hurwitz_batch, run_suite, Suite, SuiteConfig};
use mkcf_core::Params;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suites");
    g.sample_size(10);
    let cases = [
        (Suite::GaussTriple, Params::rational(0, 1, 1), 16, 200),
        (Suite::RenyiExtrema, Params::rational(1, 3, 2), 16, 200),
        (Suite::DigitRecovery, Params::rational(0, 2, 1), 16, 50),
        (Suite::Homeomorphism, Params::rational(1, 1, 1), 200, 1),
    ];
    for (suite, p, seeds, window) in cases {
        for (name, exec) in MODES {
            let cfg = SuiteConfig::new(seeds, window, 1).with_prec(256).with_exec(exec);
            g.bench_with_input(BenchmarkId::new(suite.name(), name), &cfg, |b, cfg| {
                b.iter(|| run_suite(suite, &p, cfg).unwrap())
            });
        }
    }
    g.finish();
}

fn hurwitz(c: &mut Criterion) {
    let mut g = c.benchmark_group("hurwitz");
    g.sample_size(10);
    let p = Params::rational(0, 1, 1);
    for (name, exec) in MODES {
        let cfg = SuiteConfig::new(8, 1000, 1).with_prec(256).with_exec(exec);
        g.bench_with_input(BenchmarkId::new("scan", name), &cfg, |b, cfg| {
            b.iter(|| hurwitz_batch(&p, cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, suites, hurwitz);
criterion_main!(benches);
