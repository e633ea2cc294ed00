//! Exact top-k scan: rayon path vs the sequential reference.
//!
//! Build with `--no-default-features` to measure the pure sequential build;
//! with default features `search` uses the parallel scan and
//! `search_sequential` stays the single-threaded baseline.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use oeq_core::index::InnerProductIndex;
use oeq_core::synthetic::uniform_matrix;

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("top10_scan");
    for &rows in &[10_000usize, 50_000] {
        let dim = 64;
        let matrix = uniform_matrix(rows, dim, 1);
        let index = InnerProductIndex::build(matrix, None, 0).unwrap();
        let queries = uniform_matrix(16, dim, 2);

        group.throughput(Throughput::Elements((rows * 16) as u64));
        group.bench_with_input(BenchmarkId::new("parallel", rows), &index, |b, index| {
            b.iter(|| {
                for q in 0..queries.rows() {
                    black_box(index.search(queries.row(q), 10).unwrap());
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("sequential", rows), &index, |b, index| {
            b.iter(|| {
                for q in 0..queries.rows() {
                    black_box(index.search_sequential(queries.row(q), 10).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn bench_probed(c: &mut Criterion) {
    let rows = 50_000;
    let dim = 64;
    let matrix = uniform_matrix(rows, dim, 3);
    let index = InnerProductIndex::build(matrix, Some(64), 0).unwrap();
    let queries = uniform_matrix(16, dim, 4);

    let mut group = c.benchmark_group("probed_scan");
    for &nprobe in &[4usize, 16, 64] {
        group.bench_with_input(BenchmarkId::new("nprobe", nprobe), &nprobe, |b, &nprobe| {
            b.iter(|| {
                for q in 0..queries.rows() {
                    black_box(index.search_probed(queries.row(q), 10, nprobe).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_search, bench_probed);
criterion_main!(benches);
