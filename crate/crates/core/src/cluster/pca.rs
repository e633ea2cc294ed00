//! Principal component analysis via a cyclic Jacobi eigensolver on the
//! covariance matrix.
//!
//! Deliberately dependency-free: the solver is deterministic, so reduced
//! matrices are bit-reproducible across runs and platforms. Axes follow a
//! fixed sign convention (the largest-magnitude component of each axis is
//! positive) to remove the eigenvector sign ambiguity.

use crate::error::{Error, Result};
use crate::model::EmbeddingMatrix;

/// A fitted PCA basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    input_dim: usize,
    target_dim: usize,
    mean: Vec<f64>,
    /// `target_dim x input_dim` row-major; each row is a unit-length axis.
    components: Vec<f64>,
    /// Covariance eigenvalues for the kept axes, descending.
    eigenvalues: Vec<f64>,
}

impl Pca {
    /// Fit the top `target_dim` principal axes of `matrix`.
    /// Requires `1 <= target_dim <= min(rows, dim)`.
    pub fn fit(matrix: &EmbeddingMatrix, target_dim: usize) -> Result<Pca> {
        let rows = matrix.rows();
        let dim = matrix.dim();
        if target_dim == 0 || target_dim > rows.min(dim) {
            return Err(Error::InvalidArg(format!(
                "target_dim must be in 1..={}, got {target_dim}",
                rows.min(dim)
            )));
        }

        let mut mean = vec![0.0f64; dim];
        for row in 0..rows {
            for (j, v) in matrix.row(row).iter().enumerate() {
                mean[j] += *v as f64;
            }
        }
        for m in &mut mean {
            *m /= rows as f64;
        }

        let centered: Vec<f64> = (0..rows)
            .flat_map(|row| {
                let mean = &mean;
                matrix
                    .row(row)
                    .iter()
                    .enumerate()
                    .map(move |(j, v)| *v as f64 - mean[j])
            })
            .collect();

        let covariance = covariance_matrix(&centered, rows, dim);
        let (eigenvalues, eigenvectors) = jacobi_eigen(covariance, dim);

        // Order axes by descending eigenvalue; ties keep solver order.
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            eigenvalues[b]
                .partial_cmp(&eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.cmp(&b))
        });

        let mut components = Vec::with_capacity(target_dim * dim);
        let mut kept_eigenvalues = Vec::with_capacity(target_dim);
        for &col in order.iter().take(target_dim) {
            let mut axis: Vec<f64> = (0..dim).map(|r| eigenvectors[r * dim + col]).collect();
            let mut pivot = 0;
            for (j, v) in axis.iter().enumerate() {
                if v.abs() > axis[pivot].abs() {
                    pivot = j;
                }
            }
            if axis[pivot] < 0.0 {
                for v in &mut axis {
                    *v = -*v;
                }
            }
            components.extend_from_slice(&axis);
            kept_eigenvalues.push(eigenvalues[col]);
        }

        Ok(Pca {
            input_dim: dim,
            target_dim,
            mean,
            components,
            eigenvalues: kept_eigenvalues,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    /// Kept axes, `target_dim x input_dim` row-major.
    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.components[axis * self.input_dim..(axis + 1) * self.input_dim]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Center and project, keeping full f64 precision.
    pub fn project_f64(&self, matrix: &EmbeddingMatrix) -> Result<Vec<f64>> {
        if matrix.dim() != self.input_dim {
            return Err(Error::DimMismatch {
                expected: self.input_dim,
                actual: matrix.dim(),
            });
        }
        let rows = matrix.rows();
        let mut out = vec![0.0f64; rows * self.target_dim];
        for row in 0..rows {
            let x = matrix.row(row);
            for axis in 0..self.target_dim {
                let component = self.component(axis);
                let mut acc = 0.0;
                for j in 0..self.input_dim {
                    acc += (x[j] as f64 - self.mean[j]) * component[j];
                }
                out[row * self.target_dim + axis] = acc;
            }
        }
        Ok(out)
    }

    /// Center and project into a 32-bit embedding matrix with the same ids.
    pub fn transform(&self, matrix: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
        let projected = self.project_f64(matrix)?;
        let data: Vec<f32> = projected.into_iter().map(|v| v as f32).collect();
        EmbeddingMatrix::new(self.target_dim, matrix.ids().to_vec(), data)
    }
}

/// Fit and transform in one step.
pub fn pca_reduce(matrix: &EmbeddingMatrix, target_dim: usize) -> Result<EmbeddingMatrix> {
    Pca::fit(matrix, target_dim)?.transform(matrix)
}

/// Upper-triangle covariance of centered data, mirrored to full storage.
/// Each entry accumulates over rows in index order, so the result does not
/// depend on how entries are distributed across threads.
fn covariance_matrix(centered: &[f64], rows: usize, dim: usize) -> Vec<f64> {
    let denom = if rows > 1 { (rows - 1) as f64 } else { 1.0 };
    let entry = |i: usize, j: usize| -> f64 {
        let mut acc = 0.0;
        for row in 0..rows {
            acc += centered[row * dim + i] * centered[row * dim + j];
        }
        acc / denom
    };

    #[cfg(feature = "parallel")]
    let upper: Vec<(usize, usize, f64)> = {
        use rayon::prelude::*;
        (0..dim)
            .into_par_iter()
            .flat_map_iter(|i| (i..dim).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, entry(i, j)))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let upper: Vec<(usize, usize, f64)> = (0..dim)
        .flat_map(|i| (i..dim).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, entry(i, j)))
        .collect();

    let mut cov = vec![0.0f64; dim * dim];
    for (i, j, v) in upper {
        cov[i * dim + j] = v;
        cov[j * dim + i] = v;
    }
    cov
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns (eigenvalues, eigenvectors) with eigenvectors stored column-wise:
/// column `c` of the returned matrix is the eigenvector for eigenvalue `c`.
fn jacobi_eigen(mut a: Vec<f64>, dim: usize) -> (Vec<f64>, Vec<f64>) {
    const MAX_SWEEPS: usize = 100;
    const EPS: f64 = 1e-14;

    let mut v = vec![0.0f64; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    if dim == 1 {
        return (vec![a[0]], v);
    }

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p * dim + q] * a[p * dim + q];
            }
        }
        // Scale-aware stop: off-diagonal mass relative to the diagonal.
        let diag: f64 = (0..dim).map(|i| a[i * dim + i] * a[i * dim + i]).sum();
        if off <= EPS * EPS * diag.max(f64::MIN_POSITIVE) {
            break;
        }

        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    1.0 / (2.0 * theta)
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for i in 0..dim {
                    let aip = a[i * dim + p];
                    let aiq = a[i * dim + q];
                    a[i * dim + p] = c * aip - s * aiq;
                    a[i * dim + q] = s * aip + c * aiq;
                }
                for j in 0..dim {
                    let apj = a[p * dim + j];
                    let aqj = a[q * dim + j];
                    a[p * dim + j] = c * apj - s * aqj;
                    a[q * dim + j] = s * apj + c * aqj;
                }
                for i in 0..dim {
                    let vip = v[i * dim + p];
                    let viq = v[i * dim + q];
                    v[i * dim + p] = c * vip - s * viq;
                    v[i * dim + q] = s * vip + c * viq;
                }
            }
        }
    }

    let eigenvalues: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
    (eigenvalues, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_from_rows(rows: &[Vec<f32>]) -> EmbeddingMatrix {
        let dim = rows[0].len();
        let ids = (0..rows.len()).map(|i| format!("r{i}")).collect();
        let data = rows.iter().flatten().copied().collect();
        EmbeddingMatrix::new(dim, ids, data).unwrap()
    }

    #[test]
    fn known_diagonal_covariance() {
        // Variance 8 along x, 2 along y (population denominator n-1).
        let m = matrix_from_rows(&[
            vec![2.0, 0.0],
            vec![-2.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ]);
        let pca = Pca::fit(&m, 2).unwrap();
        assert!((pca.eigenvalues()[0] - 8.0 / 3.0).abs() < 1e-9);
        assert!((pca.eigenvalues()[1] - 2.0 / 3.0).abs() < 1e-9);
        // First axis is +-x; sign convention forces +x.
        assert!((pca.component(0)[0] - 1.0).abs() < 1e-9);
        assert!(pca.component(0)[1].abs() < 1e-9);
    }

    #[test]
    fn rank_one_data_keeps_pairwise_distances() {
        let direction = [0.6f64, -0.8, 0.0];
        let rows: Vec<Vec<f32>> = (0..12)
            .map(|i| {
                let scale = i as f64 * 0.7 - 3.0;
                direction.iter().map(|d| (d * scale) as f32).collect()
            })
            .collect();
        let m = matrix_from_rows(&rows);
        let pca = Pca::fit(&m, 1).unwrap();
        let projected = pca.project_f64(&m).unwrap();
        for i in 0..rows.len() {
            for j in (i + 1)..rows.len() {
                let original: f64 = (0..3)
                    .map(|d| (rows[i][d] as f64 - rows[j][d] as f64).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let reduced = (projected[i] - projected[j]).abs();
                assert!(
                    (original - reduced).abs() < 1e-6,
                    "pair ({i},{j}): {original} vs {reduced}"
                );
            }
        }
    }

    #[test]
    fn full_dim_projection_preserves_total_variance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rows: Vec<Vec<f32>> = (0..40)
            .map(|_| (0..6).map(|_| rng.random::<f32>() * 2.0 - 1.0).collect())
            .collect();
        let m = matrix_from_rows(&rows);
        let pca = Pca::fit(&m, 6).unwrap();
        let projected = pca.project_f64(&m).unwrap();

        let variance_of = |data: &[f64], rows: usize, dim: usize| -> f64 {
            let mut mean = vec![0.0; dim];
            for r in 0..rows {
                for d in 0..dim {
                    mean[d] += data[r * dim + d];
                }
            }
            for v in &mut mean {
                *v /= rows as f64;
            }
            let mut total = 0.0;
            for r in 0..rows {
                for d in 0..dim {
                    total += (data[r * dim + d] - mean[d]).powi(2);
                }
            }
            total / (rows - 1) as f64
        };
        let original: Vec<f64> = rows.iter().flatten().map(|v| *v as f64).collect();
        let var_orig = variance_of(&original, 40, 6);
        let var_proj = variance_of(&projected, 40, 6);
        assert!((var_orig - var_proj).abs() < 1e-9, "{var_orig} vs {var_proj}");
    }

    #[test]
    fn components_are_orthonormal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f32>> = (0..50)
            .map(|_| (0..8).map(|_| rng.random::<f32>()).collect())
            .collect();
        let m = matrix_from_rows(&rows);
        let pca = Pca::fit(&m, 5).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let dot: f64 = pca
                    .component(a)
                    .iter()
                    .zip(pca.component(b))
                    .map(|(x, y)| x * y)
                    .sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-9, "axes {a},{b}: {dot}");
            }
        }
    }

    #[test]
    fn target_dim_out_of_range_rejected() {
        let m = matrix_from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(Pca::fit(&m, 0).is_err());
        assert!(Pca::fit(&m, 3).is_err());
    }
}
