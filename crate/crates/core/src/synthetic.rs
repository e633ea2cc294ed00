//! Seeded synthetic data generators for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::model::EmbeddingMatrix;

/// Isotropic Gaussian blobs: one blob per (center, size) pair, rows emitted
/// blob by blob. Returns the matrix and the generating blob label per row.
pub fn gaussian_blobs(
    centers: &[Vec<f64>],
    sizes: &[usize],
    std_dev: f64,
    seed: u64,
) -> (EmbeddingMatrix, Vec<usize>) {
    assert_eq!(centers.len(), sizes.len(), "one size per center");
    assert!(!centers.is_empty(), "at least one blob");
    let dim = centers[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std_dev).expect("finite std dev");

    let total: usize = sizes.iter().sum();
    let mut ids = Vec::with_capacity(total);
    let mut data = Vec::with_capacity(total * dim);
    let mut labels = Vec::with_capacity(total);
    let mut row = 0usize;
    for (blob, (center, &size)) in centers.iter().zip(sizes).enumerate() {
        assert_eq!(center.len(), dim, "all centers share one dim");
        for _ in 0..size {
            ids.push(format!("r{row:05}"));
            for &c in center {
                data.push((c + normal.sample(&mut rng)) as f32);
            }
            labels.push(blob);
            row += 1;
        }
    }
    let matrix = EmbeddingMatrix::new(dim, ids, data).expect("generated data is finite");
    (matrix, labels)
}

/// Blob centers spread on the corners of a scaled hypercube, a simple way
/// to get well-separated clusters in any dimension.
pub fn hypercube_centers(count: usize, dim: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            (0..dim)
                .map(|d| {
                    if (i >> (d % usize::BITS as usize)) & 1 == 1 {
                        scale
                    } else {
                        -scale
                    }
                })
                .collect()
        })
        .collect()
}

/// Uniform random matrix in [-1, 1], for search and round-trip tests.
pub fn uniform_matrix(rows: usize, dim: usize, seed: u64) -> EmbeddingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = (0..rows).map(|i| format!("r{i:05}")).collect();
    let data = (0..rows * dim)
        .map(|_| rng.random::<f32>() * 2.0 - 1.0)
        .collect();
    EmbeddingMatrix::new(dim, ids, data).expect("generated data is finite")
}
