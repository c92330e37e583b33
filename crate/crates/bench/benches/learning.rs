use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use evidal_bench::{dataset, eknn};
use evidal_core::active::{run_active_learning, ALConfig, QueryStrategy};
use evidal_core::datasets::{landscape, Bounds, LandscapeModel, SyntheticKind};
use evidal_core::scoring::ScoreParams;
use evidal_core::uncertainty::UncertaintyKind;

fn predict(c: &mut Criterion) {
    let data = dataset(SyntheticKind::ThreeClassImprecise, 500);
    let model = eknn(&data);
    c.bench_function("eknn predict/500 points", |b| {
        b.iter(|| {
            model
                .predict_mass(black_box(&[0.1, -0.2]))
                .expect("prediction")
        })
    });
    let bounds = Bounds::around(data.features().rows(), 0.1).expect("bounds");
    c.bench_function("landscape/klir 50x50", |b| {
        b.iter(|| {
            landscape(
                LandscapeModel::Evidential(&model),
                bounds,
                50,
                UncertaintyKind::Klir,
                &ScoreParams::default(),
            )
            .expect("raster")
        })
    });
}

fn active_loop(c: &mut Criterion) {
    let data = dataset(SyntheticKind::Circle, 200);
    let config = ALConfig {
        strategy: QueryStrategy::klir(0.2).expect("valid lambda"),
        repetitions: 1,
        ..ALConfig::default()
    };
    let mut group = c.benchmark_group("active learning");
    group.sample_size(10);
    group.bench_function("klir/circle 200", |b| {
        b.iter(|| run_active_learning(&data, &config).expect("run"))
    });
    group.finish();
}

criterion_group!(benches, predict, active_loop);
criterion_main!(benches);
