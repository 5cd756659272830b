use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use wildtame_bench::fixture_matrix;
use wildtame_core::exactalg::{hnf, smith};

fn normal_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("normal_forms");
    for n in [4, 8, 16] {
        let a = fixture_matrix(n, 50, n as u64);
        group.bench_with_input(BenchmarkId::new("hnf", n), &a, |b, a| b.iter(|| hnf(black_box(a))));
        group.bench_with_input(BenchmarkId::new("smith", n), &a, |b, a| b.iter(|| smith(black_box(a))));
    }
    group.finish();
}

criterion_group!(benches, normal_forms);
criterion_main!(benches);
