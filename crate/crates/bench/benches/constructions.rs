use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qtop_bench::{exact, model, numeric};
use qtop_core::rep::{Basis, Normalizer, Spin};
use qtop_core::rmatrix::{build_l, fundamental_r, lop_substituted_r, verify_ybe, Variant};
use qtop_core::tensorop::build_w_half;
use qtop_core::wigner::{build_cg, cgc_table};

fn r_matrices(c: &mut Criterion) {
    let mut g = c.benchmark_group("fundamental_r");
    for n in [2, 3, 4] {
        let ex = exact(n);
        g.bench_with_input(BenchmarkId::new("exact", n), &n, |b, &n| {
            b.iter(|| fundamental_r(black_box(n), Variant::Plus, &ex))
        });
        let nu = numeric();
        g.bench_with_input(BenchmarkId::new("numeric", n), &n, |b, &n| {
            b.iter(|| fundamental_r(black_box(n), Variant::Plus, &nu))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("ybe_exact");
    for n in [2, 3] {
        let ex = exact(n);
        let r = fundamental_r(n, Variant::Plus, &ex).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &r, |b, r| b.iter(|| verify_ybe(r, &ex)));
    }
    g.finish();

    let nu = numeric();
    c.bench_function("lop_substituted_r/spin-2", |b| {
        b.iter(|| lop_substituted_r(Spin(4), Variant::Plus, Basis::Unitary, &nu))
    });
}

fn model_space(c: &mut Criterion) {
    let nu = numeric();
    let mut g = c.benchmark_group("model_space");
    for d in [6, 12] {
        let m = model(d, &nu).unwrap();
        g.bench_with_input(BenchmarkId::new("build_l", d), &m, |b, m| b.iter(|| build_l(m, Variant::Plus)));
        g.bench_with_input(BenchmarkId::new("w_half", d), &m, |b, m| {
            b.iter(|| build_w_half(m, Normalizer::InverseSqrtQnum))
        });
    }
    g.finish();
}

fn clebsch_gordan(c: &mut Criterion) {
    let nu = numeric();
    c.bench_function("build_cg/2x2->2", |b| b.iter(|| build_cg(Spin(4), Spin(4), Spin(4), &nu)));
    c.bench_function("cgc_table/1x1/2", |b| b.iter(|| cgc_table(Spin(2), Spin(1), 12, &nu)));
}

criterion_group!(benches, r_matrices, model_space, clebsch_gordan);
criterion_main!(benches);
