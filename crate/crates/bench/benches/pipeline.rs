use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use wildtame_bench::repo_sources;
use wildtame_core::kernelctl::eligible_deltas;
use wildtame_core::quadclass::class_group;
use wildtame_core::{analyze, scan};

fn pipeline(c: &mut Criterion) {
    let src = repo_sources();
    for delta in [717, 42, 4227, -11217] {
        c.bench_function(&format!("analyze {delta}"), |b| b.iter(|| analyze(black_box(delta), &src).unwrap()));
    }
    c.bench_function("class_group -239", |b| b.iter(|| class_group(black_box(-239)).unwrap()));
    c.bench_function("eligible 0..5000", |b| b.iter(|| eligible_deltas(0, black_box(5000))));
    let mut slow = c.benchmark_group("scan");
    slow.sample_size(10);
    slow.bench_function("scan 0..1000", |b| b.iter(|| scan(0, black_box(1000), &src).unwrap()));
    slow.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
