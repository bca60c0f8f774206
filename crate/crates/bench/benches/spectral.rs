// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ergodic_bench::{product, skew};
use ergodic_core::koopman::{build_intertwiner, verify_intertwiner};
use ergodic_core::tower::{compute_tower, quasi_eigen_residual_search, DEFAULT_BAND};
use std::hint::black_box;

fn intertwiner(c: &mut Criterion) {
    let (s, t) = (skew(), product());
    let mut group = c.benchmark_group("intertwiner");
    for b in [8u32, 16, 32] {
        group.bench_with_input(BenchmarkId::new("build+verify", b), &b, |bench, &b| {
            bench.iter(|| {
                let p = build_intertwiner(&s, &t, b).unwrap();
                black_box(verify_intertwiner(&p, b).unwrap())
            })
        });
    }
    group.finish();
}

fn tower(c: &mut Criterion) {
    let s = skew();
    c.bench_function("tower/skew depth 3", |b| {
        b.iter(|| black_box(compute_tower(&s, 3).unwrap()))
    });
}

fn residual(c: &mut Criterion) {
    let t = product();
    let mut group = c.benchmark_group("residual");
    group.sample_size(10);
    for n in [4u32, 8] {
        group.bench_with_input(BenchmarkId::new("product k=1", n), &n, |b, &n| {
            b.iter(|| black_box(quasi_eigen_residual_search(&t, 1, n, DEFAULT_BAND, None).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, intertwiner, tower, residual);
criterion_main!(benches);
