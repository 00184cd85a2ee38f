use criterion::{criterion_group, criterion_main, Criterion};

use qtop_core::suite::{run, Suite, SuiteConfig};
use qtop_core::BackendKind;

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    let numeric = SuiteConfig::default();
    let exact = SuiteConfig { backend: BackendKind::Exact, ..SuiteConfig::default() };
    for s in [Suite::Ybe, Suite::Contravariant, Suite::WignerEckart] {
        g.bench_function(format!("numeric/{s}"), |b| b.iter(|| run(s, &numeric)));
    }
    g.bench_function("exact/contravariant", |b| b.iter(|| run(Suite::Contravariant, &exact)));
    g.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
