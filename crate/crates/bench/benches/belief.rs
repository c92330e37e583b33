use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use evidal_bench::masses;
use evidal_core::uncertainty::{discord, epistemic_binary_relative_likelihood, klir, KlirParams};

fn dempster(c: &mut Criterion) {
    let mut group = c.benchmark_group("dempster");
    for classes in [2, 5, 10] {
        let ms = masses(classes, 64, 6, 1);
        group.bench_with_input(BenchmarkId::from_parameter(classes), &ms, |b, ms| {
            b.iter(|| {
                for pair in ms.chunks(2) {
                    let _ = black_box(pair[0].combine_dempster(&pair[1]));
                }
            })
        });
    }
    group.finish();
}

fn measures(c: &mut Criterion) {
    let ms = masses(5, 256, 8, 2);
    c.bench_function("discord/5 classes", |b| {
        b.iter(|| ms.iter().map(|m| discord(black_box(m)).value).sum::<f64>())
    });
    let params = KlirParams::default();
    c.bench_function("klir/5 classes", |b| {
        b.iter(|| {
            ms.iter()
                .map(|m| klir(black_box(m), params).value)
                .sum::<f64>()
        })
    });
    c.bench_function("relative likelihood/1e5 grid", |b| {
        b.iter(|| epistemic_binary_relative_likelihood(black_box(13.0), black_box(4.0), 100_000))
    });
}

criterion_group!(benches, dempster, measures);
criterion_main!(benches);
