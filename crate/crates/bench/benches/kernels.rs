use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lqgcn_bench::Fixture;
use lqgcn_core::kernel::{DenseMatrix, RngStream};
use lqgcn_core::losses::{bp_loss_balanced, build_b, lq_loss, BpEstimator};
use lqgcn_core::normalize_adjacency;
use std::hint::black_box;

const SIZES: [usize; 2] = [1000, 5000];
const K: usize = 10;

fn random(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = RngStream::new(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| rng.uniform())
}

fn sparse_dense(c: &mut Criterion) {
    let mut group = c.benchmark_group("spmm");
    for n in SIZES {
        let fx = Fixture::planted(n, K, 20.0, 0).unwrap();
        let a = normalize_adjacency(&fx.graph);
        let h = random(n, 128, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| a.matrix().spmm(black_box(&h)).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("gemm");
    for n in SIZES {
        let x = random(n, 128, 2);
        let w = random(128, K, 3);
        group.bench_with_input(BenchmarkId::new("nxh_by_hxk", n), &n, |b, _| {
            b.iter(|| DenseMatrix::gemm(black_box(&x), false, &w, false).unwrap())
        });
        let f = random(n, K, 4);
        group.bench_with_input(BenchmarkId::new("ft_f", n), &n, |b, _| {
            b.iter(|| DenseMatrix::gemm(black_box(&f), true, &f, false).unwrap())
        });
    }
    group.finish();
}

fn losses(c: &mut Criterion) {
    let mut group = c.benchmark_group("losses");
    for n in SIZES {
        let fx = Fixture::planted(n, K, 20.0, 0).unwrap();
        let f = random(n, K, 5);
        group.bench_with_input(BenchmarkId::new("bp_exact", n), &n, |b, _| {
            let mut rng = RngStream::new(0);
            b.iter(|| bp_loss_balanced(black_box(&f), &fx.graph, BpEstimator::Exact, &mut rng).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bp_sampled_1000", n), &n, |b, _| {
            let mut rng = RngStream::new(0);
            b.iter(|| bp_loss_balanced(black_box(&f), &fx.graph, BpEstimator::Sampled(1000), &mut rng).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("lq", n), &n, |b, _| {
            b.iter(|| lq_loss(black_box(&f), &fx.graph).unwrap())
        });
        let bm = build_b(&fx.graph).unwrap();
        group.bench_with_input(BenchmarkId::new("modularity_apply", n), &n, |b, _| {
            b.iter(|| bm.apply(black_box(&f)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sparse_dense, losses);
criterion_main!(benches);
