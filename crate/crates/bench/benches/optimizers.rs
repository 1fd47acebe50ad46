use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dtaopt_bench::uniform_etas;
use dtaopt_core::{brute_force, coefficients, optimize_general, optimize_sfl, registry_lookup};

fn optimizers(c: &mut Criterion) {
    let f1 = registry_lookup("F1", None).unwrap();
    let am = registry_lookup("AM", None).unwrap();

    let mut group = c.benchmark_group("optimizers");
    group.sample_size(10);
    for n in [50usize, 100, 200] {
        let etas = uniform_etas(n, n as u64);
        group.bench_with_input(BenchmarkId::new("general/F1", n), &etas, |b, e| {
            b.iter(|| optimize_general(&f1, black_box(e)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("general/AM", n), &etas, |b, e| {
            b.iter(|| optimize_general(&am, black_box(e)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sfl/F1", n), &etas, |b, e| {
            b.iter(|| optimize_sfl(&f1, black_box(e)).unwrap())
        });
    }
    group.finish();
}

fn small_exact(c: &mut Criterion) {
    let f1 = registry_lookup("F1", None).unwrap();
    let mut group = c.benchmark_group("brute");
    for n in [8usize, 12] {
        let etas = uniform_etas(n, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &etas, |b, e| {
            b.iter(|| brute_force(&f1, black_box(e)).unwrap())
        });
    }
    group.finish();
}

fn poisson_binomial(c: &mut Criterion) {
    let mut group = c.benchmark_group("coefficients");
    for n in [100usize, 1000] {
        let etas = uniform_etas(n, 3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &etas, |b, e| {
            b.iter(|| coefficients(black_box(e)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, optimizers, small_exact, poisson_binomial);
criterion_main!(benches);
