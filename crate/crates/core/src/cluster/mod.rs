//! Question clustering: k-means with seeded k-means++ initialization,
//! cluster validity indices, k selection by elbow and silhouette, and
//! descriptive keyword extraction.
//!
//! Everything here is deterministic for a fixed seed: assignment steps may
//! run in parallel, but every per-row computation and every reduction runs
//! in a fixed order, so thread count never changes the output.

mod pca;

pub use pca::{pca_reduce, Pca};

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EmbeddingMatrix;

/// K-means output: centroids, assignments, and run provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub dim: usize,
    /// `k x dim` row-major centroid block.
    pub centroids: Vec<f64>,
    /// Cluster id per row, each in `0..k`.
    pub assignments: Vec<usize>,
    pub seed: u64,
    pub iterations_run: usize,
    pub converged: bool,
}

impl ClusterModel {
    pub fn centroid(&self, cluster: usize) -> &[f64] {
        &self.centroids[cluster * self.dim..(cluster + 1) * self.dim]
    }
}

/// Validity indices for one clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterValidity {
    pub sse: f64,
    pub silhouette: f64,
    pub calinski_harabasz: f64,
    pub davies_bouldin: f64,
}

/// Lloyd iteration limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmeansParams {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for KmeansParams {
    fn default() -> Self {
        KmeansParams {
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

fn to_f64(matrix: &EmbeddingMatrix) -> Vec<f64> {
    matrix.data().iter().map(|&v| v as f64).collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Cluster `matrix` into `k` groups with default iteration limits.
pub fn kmeans(matrix: &EmbeddingMatrix, k: usize, seed: u64) -> Result<ClusterModel> {
    kmeans_with(matrix, k, seed, &KmeansParams::default())
}

/// Cluster with explicit limits. Initialization is k-means++ driven by a
/// ChaCha stream seeded from `seed`; empty clusters are repaired by moving
/// the centroid onto the point farthest from it.
pub fn kmeans_with(
    matrix: &EmbeddingMatrix,
    k: usize,
    seed: u64,
    params: &KmeansParams,
) -> Result<ClusterModel> {
    let rows = matrix.rows();
    if k == 0 {
        return Err(Error::InvalidArg("k must be positive".into()));
    }
    if k > rows {
        return Err(Error::InvalidArg(format!(
            "k = {k} exceeds row count {rows}"
        )));
    }
    let dim = matrix.dim();
    let data = to_f64(matrix);
    let centroids = plus_plus_init(&data, rows, dim, k, seed);
    Ok(lloyd(&data, rows, dim, k, centroids, params, seed))
}

fn plus_plus_init(data: &[f64], rows: usize, dim: usize, k: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..rows);
    centroids.extend_from_slice(&data[first * dim..(first + 1) * dim]);

    let mut nearest = vec![0.0f64; rows];
    for row in 0..rows {
        nearest[row] = dist2(&data[row * dim..(row + 1) * dim], &centroids[..dim]);
    }

    for _ in 1..k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let draw = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut picked = rows - 1;
            for (row, &weight) in nearest.iter().enumerate() {
                acc += weight;
                if draw < acc {
                    picked = row;
                    break;
                }
            }
            picked
        } else {
            rng.random_range(0..rows)
        };
        let start = centroids.len();
        centroids.extend_from_slice(&data[next * dim..(next + 1) * dim]);
        let new_centroid = &centroids[start..start + dim];
        for row in 0..rows {
            let d = dist2(&data[row * dim..(row + 1) * dim], new_centroid);
            if d < nearest[row] {
                nearest[row] = d;
            }
        }
    }
    centroids
}

fn assign_all(data: &[f64], rows: usize, dim: usize, k: usize, centroids: &[f64]) -> Vec<usize> {
    let assign_one = |row: usize| -> usize {
        let x = &data[row * dim..(row + 1) * dim];
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let d = dist2(x, &centroids[c * dim..(c + 1) * dim]);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        best
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..rows).into_par_iter().map(assign_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..rows).map(assign_one).collect()
    }
}

fn sse_of(data: &[f64], dim: usize, centroids: &[f64], assignments: &[usize]) -> f64 {
    let mut total = 0.0;
    for (row, &c) in assignments.iter().enumerate() {
        total += dist2(
            &data[row * dim..(row + 1) * dim],
            &centroids[c * dim..(c + 1) * dim],
        );
    }
    total
}

/// Lloyd iterations from given initial centroids. The stored assignments
/// are exactly the ones the final centroids were averaged from.
fn lloyd(
    data: &[f64],
    rows: usize,
    dim: usize,
    k: usize,
    mut centroids: Vec<f64>,
    params: &KmeansParams,
    seed: u64,
) -> ClusterModel {
    let mut assignments = vec![0usize; rows];
    let mut converged = false;
    let mut iterations_run = 0;
    let mut prev_sse = f64::INFINITY;

    for _ in 0..params.max_iter {
        iterations_run += 1;
        assignments = assign_all(data, rows, dim, k, &centroids);

        let sse = sse_of(data, dim, &centroids, &assignments);
        debug_assert!(
            sse <= prev_sse * (1.0 + 1e-12) + 1e-12,
            "k-means objective increased: {prev_sse} -> {sse}"
        );
        prev_sse = sse;

        // Means per cluster, accumulated in row order.
        let mut sums = vec![0.0f64; k * dim];
        let mut counts = vec![0usize; k];
        for (row, &c) in assignments.iter().enumerate() {
            counts[c] += 1;
            let x = &data[row * dim..(row + 1) * dim];
            let target = &mut sums[c * dim..(c + 1) * dim];
            for (t, v) in target.iter_mut().zip(x) {
                *t += v;
            }
        }
        let mut next = centroids.clone();
        for c in 0..k {
            if counts[c] > 0 {
                for d in 0..dim {
                    next[c * dim + d] = sums[c * dim + d] / counts[c] as f64;
                }
            }
        }
        // Repair: move each empty cluster's centroid onto the point farthest
        // from it. The cluster has no members, so the objective is untouched
        // and the Lloyd descent stays monotone.
        let mut taken = vec![false; rows];
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let stale = centroids[c * dim..(c + 1) * dim].to_vec();
            let mut farthest = None;
            let mut farthest_d = -1.0;
            for row in 0..rows {
                if taken[row] {
                    continue;
                }
                let d = dist2(&data[row * dim..(row + 1) * dim], &stale);
                if d > farthest_d {
                    farthest_d = d;
                    farthest = Some(row);
                }
            }
            if let Some(row) = farthest {
                taken[row] = true;
                next[c * dim..(c + 1) * dim]
                    .copy_from_slice(&data[row * dim..(row + 1) * dim]);
            }
        }

        let mut shift2: f64 = 0.0;
        for c in 0..k {
            let d = dist2(
                &centroids[c * dim..(c + 1) * dim],
                &next[c * dim..(c + 1) * dim],
            );
            if d > shift2 {
                shift2 = d;
            }
        }
        centroids = next;
        if shift2.sqrt() < params.tol {
            converged = true;
            break;
        }
    }

    ClusterModel {
        k,
        dim,
        centroids,
        assignments,
        seed,
        iterations_run,
        converged,
    }
}

/// Sum of squared distances from each row to its assigned centroid.
pub fn sse(matrix: &EmbeddingMatrix, model: &ClusterModel) -> Result<f64> {
    if model.assignments.len() != matrix.rows() {
        return Err(Error::InvalidArg(format!(
            "model assigns {} rows, matrix has {}",
            model.assignments.len(),
            matrix.rows()
        )));
    }
    if model.dim != matrix.dim() {
        return Err(Error::DimMismatch {
            expected: model.dim,
            actual: matrix.dim(),
        });
    }
    if let Some(&bad) = model.assignments.iter().find(|&&c| c >= model.k) {
        return Err(Error::InvalidArg(format!(
            "assignment {bad} out of range for k = {}",
            model.k
        )));
    }
    let data = to_f64(matrix);
    Ok(sse_of(&data, matrix.dim(), &model.centroids, &model.assignments))
}

/// Distinct labels in ascending order plus per-row compact labels.
fn compact_labels(assignments: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let distinct: Vec<usize> = assignments
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<usize, usize> = distinct
        .iter()
        .enumerate()
        .map(|(i, &label)| (label, i))
        .collect();
    let compact = assignments.iter().map(|label| index[label]).collect();
    (distinct, compact)
}

fn check_assignments(matrix: &EmbeddingMatrix, assignments: &[usize]) -> Result<()> {
    if assignments.len() != matrix.rows() {
        return Err(Error::InvalidArg(format!(
            "{} assignments for {} rows",
            assignments.len(),
            matrix.rows()
        )));
    }
    Ok(())
}

/// Mean silhouette coefficient over all points: (b - a) / max(a, b) with
/// `a` the mean intra-cluster distance (self excluded) and `b` the smallest
/// mean distance to another cluster. Points in singleton clusters
/// contribute 0. Requires at least two clusters.
pub fn silhouette(matrix: &EmbeddingMatrix, assignments: &[usize]) -> Result<f64> {
    silhouette_impl(matrix, assignments, true)
}

/// Sequential reference for [`silhouette`]; same contract, same result.
/// Kept public for benchmarks and as the non-`parallel` fallback.
pub fn silhouette_sequential(matrix: &EmbeddingMatrix, assignments: &[usize]) -> Result<f64> {
    silhouette_impl(matrix, assignments, false)
}

fn silhouette_impl(
    matrix: &EmbeddingMatrix,
    assignments: &[usize],
    parallel: bool,
) -> Result<f64> {
    check_assignments(matrix, assignments)?;
    let (distinct, labels) = compact_labels(assignments);
    let k = distinct.len();
    if k < 2 {
        return Err(Error::Undefined(
            "silhouette requires at least two clusters".into(),
        ));
    }
    let rows = matrix.rows();
    let dim = matrix.dim();
    let data = to_f64(matrix);
    let mut sizes = vec![0usize; k];
    for &label in &labels {
        sizes[label] += 1;
    }

    let point_score = |i: usize| -> f64 {
        let own = labels[i];
        if sizes[own] == 1 {
            return 0.0;
        }
        let xi = &data[i * dim..(i + 1) * dim];
        let mut sums = vec![0.0f64; k];
        for (j, &label) in labels.iter().enumerate() {
            if j == i {
                continue;
            }
            sums[label] += dist2(xi, &data[j * dim..(j + 1) * dim]).sqrt();
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let mut b = f64::INFINITY;
        for c in 0..k {
            if c != own {
                let mean = sums[c] / sizes[c] as f64;
                if mean < b {
                    b = mean;
                }
            }
        }
        let denom = a.max(b);
        if denom == 0.0 {
            0.0
        } else {
            (b - a) / denom
        }
    };

    let scores: Vec<f64> = if parallel {
        collect_scores_parallel(rows, &point_score)
    } else {
        (0..rows).map(point_score).collect()
    };
    Ok(scores.iter().sum::<f64>() / rows as f64)
}

#[cfg(feature = "parallel")]
fn collect_scores_parallel(rows: usize, score: &(impl Fn(usize) -> f64 + Sync)) -> Vec<f64> {
    use rayon::prelude::*;
    (0..rows).into_par_iter().map(score).collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_scores_parallel(rows: usize, score: &impl Fn(usize) -> f64) -> Vec<f64> {
    (0..rows).map(score).collect()
}

struct ClusterGeometry {
    k: usize,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    /// Exact per-cluster means over the given assignments.
    means: Vec<f64>,
    data: Vec<f64>,
    dim: usize,
}

fn cluster_geometry(matrix: &EmbeddingMatrix, assignments: &[usize]) -> Result<ClusterGeometry> {
    check_assignments(matrix, assignments)?;
    let (distinct, labels) = compact_labels(assignments);
    let k = distinct.len();
    let dim = matrix.dim();
    let data = to_f64(matrix);
    let mut sizes = vec![0usize; k];
    let mut means = vec![0.0f64; k * dim];
    for (row, &label) in labels.iter().enumerate() {
        sizes[label] += 1;
        for d in 0..dim {
            means[label * dim + d] += data[row * dim + d];
        }
    }
    for c in 0..k {
        for d in 0..dim {
            means[c * dim + d] /= sizes[c] as f64;
        }
    }
    Ok(ClusterGeometry {
        k,
        labels,
        sizes,
        means,
        data,
        dim,
    })
}

/// Calinski-Harabasz index: between-cluster over within-cluster scatter,
/// each normalized by its degrees of freedom. Degenerate zero-scatter
/// clusterings return +infinity with a warning.
pub fn calinski_harabasz(matrix: &EmbeddingMatrix, assignments: &[usize]) -> Result<f64> {
    let geo = cluster_geometry(matrix, assignments)?;
    let n = matrix.rows();
    if geo.k < 2 {
        return Err(Error::Undefined(
            "calinski-harabasz requires at least two clusters".into(),
        ));
    }
    if n <= geo.k {
        return Err(Error::Undefined(
            "calinski-harabasz requires more rows than clusters".into(),
        ));
    }
    let dim = geo.dim;
    let mut overall = vec![0.0f64; dim];
    for row in 0..n {
        for d in 0..dim {
            overall[d] += geo.data[row * dim + d];
        }
    }
    for v in &mut overall {
        *v /= n as f64;
    }

    let mut between = 0.0;
    for c in 0..geo.k {
        between += geo.sizes[c] as f64 * dist2(&geo.means[c * dim..(c + 1) * dim], &overall);
    }
    let mut within = 0.0;
    for (row, &label) in geo.labels.iter().enumerate() {
        within += dist2(
            &geo.data[row * dim..(row + 1) * dim],
            &geo.means[label * dim..(label + 1) * dim],
        );
    }
    if within == 0.0 {
        log::warn!("calinski-harabasz: zero within-cluster scatter, reporting +inf");
        return Ok(f64::INFINITY);
    }
    Ok((between / (geo.k - 1) as f64) / (within / (n - geo.k) as f64))
}

/// Davies-Bouldin index: mean over clusters of the worst
/// (s_i + s_j) / d_ij ratio, with `s` the mean member-to-centroid distance
/// and `d` the centroid separation. Errors on coincident centroids.
pub fn davies_bouldin(matrix: &EmbeddingMatrix, assignments: &[usize]) -> Result<f64> {
    let geo = cluster_geometry(matrix, assignments)?;
    if geo.k < 2 {
        return Err(Error::Undefined(
            "davies-bouldin requires at least two clusters".into(),
        ));
    }
    let dim = geo.dim;
    let mut spread = vec![0.0f64; geo.k];
    for (row, &label) in geo.labels.iter().enumerate() {
        spread[label] += dist2(
            &geo.data[row * dim..(row + 1) * dim],
            &geo.means[label * dim..(label + 1) * dim],
        )
        .sqrt();
    }
    for c in 0..geo.k {
        spread[c] /= geo.sizes[c] as f64;
    }

    let mut total = 0.0;
    for i in 0..geo.k {
        let mut worst: f64 = 0.0;
        for j in 0..geo.k {
            if i == j {
                continue;
            }
            let separation = dist2(
                &geo.means[i * dim..(i + 1) * dim],
                &geo.means[j * dim..(j + 1) * dim],
            )
            .sqrt();
            if separation == 0.0 {
                return Err(Error::Undefined(format!(
                    "davies-bouldin: clusters {i} and {j} have coincident centroids"
                )));
            }
            worst = worst.max((spread[i] + spread[j]) / separation);
        }
        total += worst;
    }
    Ok(total / geo.k as f64)
}

/// All four validity indices for one clustering. SSE here is measured
/// against the exact per-cluster means of the given assignments.
pub fn cluster_validity(matrix: &EmbeddingMatrix, assignments: &[usize]) -> Result<ClusterValidity> {
    let geo = cluster_geometry(matrix, assignments)?;
    let dim = geo.dim;
    let mut sse = 0.0;
    for (row, &label) in geo.labels.iter().enumerate() {
        sse += dist2(
            &geo.data[row * dim..(row + 1) * dim],
            &geo.means[label * dim..(label + 1) * dim],
        );
    }
    Ok(ClusterValidity {
        sse,
        silhouette: silhouette(matrix, assignments)?,
        calinski_harabasz: calinski_harabasz(matrix, assignments)?,
        davies_bouldin: davies_bouldin(matrix, assignments)?,
    })
}

/// One row of the k-selection table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSelectionRow {
    pub k: usize,
    pub sse: f64,
    pub silhouette: f64,
    /// Seed of the winning run for this k.
    pub seed: u64,
}

/// Outcome of the k sweep: the per-k table, the silhouette argmax (which
/// decides), and the elbow candidate for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSelectionReport {
    pub table: Vec<KSelectionRow>,
    /// Silhouette argmax; the selected cluster count.
    pub chosen_k: usize,
    /// Argmax of the discrete second difference of SSE, when the sweep is
    /// wide enough to have interior points.
    pub elbow_k: Option<usize>,
    /// True when elbow and silhouette name the same k.
    pub methods_agree: bool,
}

/// Sweep `k_range`, running `seeds_per_k` seeded restarts per k and keeping
/// each k's lowest-SSE model.
///
/// Every k > range start also tries a warm start grown from the previous
/// best model (its centroids plus the point farthest from its own centroid),
/// which keeps best SSE non-increasing in k. `chosen_k` is the silhouette
/// argmax; the elbow candidate is reported alongside.
pub fn select_k(
    matrix: &EmbeddingMatrix,
    k_range: RangeInclusive<usize>,
    seeds_per_k: usize,
    base_seed: u64,
) -> Result<KSelectionReport> {
    let (lo, hi) = (*k_range.start(), *k_range.end());
    if lo > hi {
        return Err(Error::InvalidArg("empty k range".into()));
    }
    if lo < 2 || hi + 1 > matrix.rows() {
        return Err(Error::InvalidArg(format!(
            "k range must lie within 2..={}, got {lo}..={hi}",
            matrix.rows().saturating_sub(1)
        )));
    }
    if seeds_per_k == 0 {
        return Err(Error::InvalidArg("seeds_per_k must be positive".into()));
    }

    let rows = matrix.rows();
    let dim = matrix.dim();
    let data = to_f64(matrix);
    let params = KmeansParams::default();

    let mut table = Vec::new();
    let mut best_models: Vec<ClusterModel> = Vec::new();
    for k in lo..=hi {
        let mut best: Option<(f64, ClusterModel)> = None;
        let mut consider = |model: ClusterModel| {
            let sse = sse_of(&data, dim, &model.centroids, &model.assignments);
            match &best {
                Some((best_sse, _)) if *best_sse <= sse => {}
                _ => best = Some((sse, model)),
            }
        };
        for s in 0..seeds_per_k {
            let seed = base_seed.wrapping_add(s as u64);
            let centroids = plus_plus_init(&data, rows, dim, k, seed);
            consider(lloyd(&data, rows, dim, k, centroids, &params, seed));
        }
        if let Some(prev) = best_models.last() {
            let mut centroids = prev.centroids.clone();
            let mut farthest = 0;
            let mut farthest_d = -1.0;
            for (row, &c) in prev.assignments.iter().enumerate() {
                let d = dist2(
                    &data[row * dim..(row + 1) * dim],
                    &prev.centroids[c * dim..(c + 1) * dim],
                );
                if d > farthest_d {
                    farthest_d = d;
                    farthest = row;
                }
            }
            centroids.extend_from_slice(&data[farthest * dim..(farthest + 1) * dim]);
            consider(lloyd(&data, rows, dim, k, centroids, &params, prev.seed));
        }
        let (sse, model) = best.expect("at least one seeded run per k");
        let silhouette = silhouette(matrix, &model.assignments)?;
        table.push(KSelectionRow {
            k,
            sse,
            silhouette,
            seed: model.seed,
        });
        best_models.push(model);
    }

    let chosen_idx = table
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.silhouette
                .partial_cmp(&b.silhouette)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| ib.cmp(ia))
        })
        .map(|(i, _)| i)
        .expect("non-empty table");
    let elbow_k = if table.len() >= 3 {
        let mut best_idx = 1;
        let mut best_curve = f64::NEG_INFINITY;
        for i in 1..table.len() - 1 {
            let curve = table[i - 1].sse - 2.0 * table[i].sse + table[i + 1].sse;
            if curve > best_curve {
                best_curve = curve;
                best_idx = i;
            }
        }
        Some(table[best_idx].k)
    } else {
        None
    };
    let chosen_k = table[chosen_idx].k;
    Ok(KSelectionReport {
        methods_agree: elbow_k == Some(chosen_k),
        table,
        chosen_k,
        elbow_k,
    })
}

/// Pull the best model for `k` back out of a sweep (reruns the winning seed).
pub fn rerun_best(
    matrix: &EmbeddingMatrix,
    report: &KSelectionReport,
) -> Result<ClusterModel> {
    let row = report
        .table
        .iter()
        .find(|r| r.k == report.chosen_k)
        .ok_or_else(|| Error::InvalidArg("chosen k missing from table".into()))?;
    kmeans(matrix, row.k, row.seed)
}

/// Descriptive top terms per cluster by tf-idf over the member texts.
///
/// Terms are lowercase alphanumeric words of length >= 3; idf is
/// ln(k / df) over clusters, so terms present in every cluster score zero.
/// Returns (label, terms) per distinct label in ascending label order.
pub fn cluster_keywords(
    texts: &[String],
    assignments: &[usize],
    top_n: usize,
) -> Result<Vec<(usize, Vec<String>)>> {
    if texts.len() != assignments.len() {
        return Err(Error::InvalidArg(format!(
            "{} texts for {} assignments",
            texts.len(),
            assignments.len()
        )));
    }
    let (distinct, labels) = compact_labels(assignments);
    let k = distinct.len();
    let mut term_counts: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new(); k];
    for (text, &label) in texts.iter().zip(&labels) {
        for token in tokenize(text) {
            *term_counts[label].entry(token).or_insert(0) += 1;
        }
    }
    let mut doc_freq: BTreeMap<&str, usize> = BTreeMap::new();
    for counts in &term_counts {
        for term in counts.keys() {
            *doc_freq.entry(term).or_insert(0) += 1;
        }
    }

    let mut out = Vec::with_capacity(k);
    for (label, counts) in distinct.iter().zip(&term_counts) {
        let mut scored: Vec<(f64, &str)> = counts
            .iter()
            .map(|(term, &tf)| {
                let idf = ((k as f64) / doc_freq[term.as_str()] as f64).ln();
                (tf as f64 * idf, term.as_str())
            })
            .filter(|(score, _)| *score > 0.0)
            .collect();
        scored.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.1.cmp(b.1))
        });
        out.push((
            *label,
            scored
                .into_iter()
                .take(top_n)
                .map(|(_, term)| term.to_string())
                .collect(),
        ));
    }
    Ok(out)
}

fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| w.chars().count() >= 3)
        .map(str::to_string)
        .collect()
}
