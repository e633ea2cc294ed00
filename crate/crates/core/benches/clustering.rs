//! Clustering kernels: parallel silhouette vs the sequential reference,
//! plus end-to-end k-means and the k-selection sweep.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oeq_core::cluster::{kmeans, select_k, silhouette, silhouette_sequential};
use oeq_core::synthetic::{gaussian_blobs, hypercube_centers};

fn blob_matrix(rows_per_blob: usize) -> oeq_core::model::EmbeddingMatrix {
    let centers = hypercube_centers(8, 16, 2.0);
    let sizes = vec![rows_per_blob; 8];
    gaussian_blobs(&centers, &sizes, 0.4, 5).0
}

fn bench_silhouette(c: &mut Criterion) {
    let mut group = c.benchmark_group("silhouette");
    for &rows_per_blob in &[64usize, 256] {
        let matrix = blob_matrix(rows_per_blob);
        let labels = kmeans(&matrix, 8, 0).unwrap().assignments;
        group.bench_with_input(
            BenchmarkId::new("parallel", matrix.rows()),
            &matrix,
            |b, matrix| b.iter(|| black_box(silhouette(matrix, &labels).unwrap())),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", matrix.rows()),
            &matrix,
            |b, matrix| b.iter(|| black_box(silhouette_sequential(matrix, &labels).unwrap())),
        );
    }
    group.finish();
}

fn bench_kmeans(c: &mut Criterion) {
    let matrix = blob_matrix(256);
    c.bench_function("kmeans_8x2048x16", |b| {
        b.iter(|| black_box(kmeans(&matrix, 8, 0).unwrap()))
    });
}

fn bench_select_k(c: &mut Criterion) {
    let matrix = blob_matrix(64);
    c.bench_function("select_k_2to8", |b| {
        b.iter(|| black_box(select_k(&matrix, 2..=8, 3, 0).unwrap()))
    });
}

criterion_group!(benches, bench_silhouette, bench_kmeans, bench_select_k);
criterion_main!(benches);
