use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lqgcn_bench::Fixture;
use lqgcn_core::{train, ConvVariant, TrainConfig};
use std::hint::black_box;

const ITERS: usize = 10;

fn training(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("train_{ITERS}_iters"));
    group.sample_size(10);
    for n in [1000, 5000] {
        let fx = Fixture::planted(n, 10, 20.0, 0).unwrap();
        for (name, variant) in [("main", ConvVariant::Main), ("ablation", ConvVariant::Ablation)] {
            let cfg = TrainConfig {
                k: 10,
                max_iters: ITERS,
                variant,
                ..TrainConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| train(black_box(&fx.graph), &fx.attrs, &cfg).unwrap())
            });
        }
        let cfg = TrainConfig {
            k: 10,
            max_iters: ITERS,
            lq_enabled: false,
            ..TrainConfig::default()
        };
        group.bench_with_input(BenchmarkId::new("bp_only", n), &n, |b, _| {
            b.iter(|| train(black_box(&fx.graph), &fx.attrs, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, training);
criterion_main!(benches);
