//! Parallel against sequential evaluation of the batched Monte Carlo kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use stable_stein::numerics::parallel::{map_indexed, map_indexed_sequential};
use stable_stein::numerics::RngStream;
use stable_stein::stable::{sample, StableParams};
use stable_stein::stein::{StableOperator, TestFunction};

fn sampling(c: &mut Criterion) {
    let p = StableParams::new(1.5, 0.0, 1.0, 0.5).unwrap();
    let root = RngStream::new(1);
    let batch = |i: usize| sample(&p, 4096, root.substream(i as u64)).unwrap();
    let mut group = c.benchmark_group("stable_draws_32x4096");
    group.bench_function("parallel", |b| b.iter(|| black_box(map_indexed(32, batch))));
    group.bench_function("sequential", |b| b.iter(|| black_box(map_indexed_sequential(32, batch))));
    group.finish();
}

fn operator(c: &mut Criterion) {
    let op = StableOperator::new(&StableParams::symmetric(1.2, 1.0).unwrap()).unwrap();
    let g = TestFunction::gaussian_bump(0.0, 1.0);
    let eval = |i: usize| op.apply(&g, -4.0 + 8.0 * i as f64 / 63.0).unwrap().value;
    let mut group = c.benchmark_group("stable_operator_64_points");
    group.sample_size(10);
    for (name, parallel) in [("parallel", true), ("sequential", false)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &parallel, |b, &par| {
            b.iter(|| black_box(if par { map_indexed(64, eval) } else { map_indexed_sequential(64, eval) }))
        });
    }
    group.finish();
}

criterion_group!(benches, sampling, operator);
criterion_main!(benches);
