//! Exact top-k inner-product retrieval over an embedding matrix, with an
//! optional inverted-list partition mode for large corpora.
//!
//! Exact search is the semantic reference: results always equal an
//! exhaustive scan, with ties broken by ascending passage id. Partitioned
//! search probes the `nprobe` partitions whose centroids score highest
//! against the query; probing every partition reproduces exact search.

use std::cmp::Ordering;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use crate::cluster;
use crate::error::{Error, Result};
use crate::model::{self, EmbeddingMatrix};

/// Magic bytes of the optional partition section in index files.
const PARTITION_MAGIC: &[u8; 4] = b"PRT1";

/// One search result: a row id and its raw inner product with the query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalHit {
    pub passage_id: String,
    pub score: f32,
}

#[derive(Debug, Clone, PartialEq)]
struct PartitionTable {
    /// k x dim row-major centroid block.
    centroids: Vec<f32>,
    /// Row indices per partition; together an exact partition of all rows.
    members: Vec<Vec<u32>>,
}

/// Immutable inner-product index. Concurrent searches are lock-free.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProductIndex {
    matrix: EmbeddingMatrix,
    partitions: Option<PartitionTable>,
}

fn dot(a: &[f32], b: &[f32]) -> f32 {
    // Sequential accumulation: scores are bit-identical regardless of how
    // rows are distributed across threads.
    let mut acc = 0.0f32;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

impl InnerProductIndex {
    /// Build an index over `matrix`. With `partitions = Some(p)`, rows are
    /// grouped by k-means (seeded, deterministic) into `p` inverted lists.
    pub fn build(
        matrix: EmbeddingMatrix,
        partitions: Option<usize>,
        seed: u64,
    ) -> Result<InnerProductIndex> {
        if matrix.rows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        matrix.check_finite()?;
        let table = match partitions {
            None => None,
            Some(p) => {
                if p == 0 || p > matrix.rows() {
                    return Err(Error::InvalidArg(format!(
                        "partitions must be in 1..={}, got {p}",
                        matrix.rows()
                    )));
                }
                let model = cluster::kmeans(&matrix, p, seed)?;
                let mut members = vec![Vec::new(); p];
                for (row, &cluster_id) in model.assignments.iter().enumerate() {
                    members[cluster_id].push(row as u32);
                }
                let centroids = model.centroids.iter().map(|&c| c as f32).collect();
                Some(PartitionTable { centroids, members })
            }
        };
        Ok(InnerProductIndex {
            matrix,
            partitions: table,
        })
    }

    pub fn matrix(&self) -> &EmbeddingMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn partition_count(&self) -> Option<usize> {
        self.partitions.as_ref().map(|t| t.members.len())
    }

    /// Member row indices per partition, when partitioned.
    pub fn partition_members(&self) -> Option<&[Vec<u32>]> {
        self.partitions.as_ref().map(|t| t.members.as_slice())
    }

    fn check_query(&self, query: &[f32], k: usize) -> Result<()> {
        if query.len() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                actual: query.len(),
            });
        }
        if query.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArg("query contains non-finite values".into()));
        }
        if k == 0 {
            return Err(Error::InvalidArg("k must be positive".into()));
        }
        Ok(())
    }

    /// Exact top-k: the k largest inner products in descending order, ties
    /// broken by ascending passage id. Pure function of (index, query, k).
    pub fn search(&self, query: &[f32], k: usize) -> Result<Vec<RetrievalHit>> {
        self.check_query(query, k)?;
        Ok(self.scan(query, k, None))
    }

    /// Sequential reference for [`search`]; same contract, same results.
    /// Kept public for benchmarks and as the non-`parallel` fallback.
    pub fn search_sequential(&self, query: &[f32], k: usize) -> Result<Vec<RetrievalHit>> {
        self.check_query(query, k)?;
        let rows: Vec<u32> = (0..self.rows() as u32).collect();
        let cands = self.score_rows_seq(query, &rows, k);
        Ok(self.to_hits(cands))
    }

    /// Partitioned search probing the `nprobe` highest-scoring partitions
    /// (clamped to the partition count). With a full probe this equals
    /// exact search.
    pub fn search_probed(&self, query: &[f32], k: usize, nprobe: usize) -> Result<Vec<RetrievalHit>> {
        self.check_query(query, k)?;
        let table = self.partitions.as_ref().ok_or_else(|| {
            Error::InvalidArg("index has no partitions; use exact search".into())
        })?;
        if nprobe == 0 {
            return Err(Error::InvalidArg("nprobe must be positive".into()));
        }
        let p = table.members.len();
        let nprobe = nprobe.min(p);
        let dim = self.dim();
        let mut ranked: Vec<(f32, usize)> = (0..p)
            .map(|i| (dot(query, &table.centroids[i * dim..(i + 1) * dim]), i))
            .collect();
        ranked.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.1.cmp(&b.1))
        });
        let mut rows: Vec<u32> = Vec::new();
        for &(_, part) in ranked.iter().take(nprobe) {
            rows.extend_from_slice(&table.members[part]);
        }
        Ok(self.scan(query, k, Some(rows)))
    }

    /// Search many queries, preserving query order in the output.
    pub fn batch_search(&self, queries: &EmbeddingMatrix, k: usize) -> Result<Vec<Vec<RetrievalHit>>> {
        if queries.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                actual: queries.dim(),
            });
        }
        (0..queries.rows())
            .map(|i| self.search(queries.row(i), k))
            .collect()
    }

    fn scan(&self, query: &[f32], k: usize, rows: Option<Vec<u32>>) -> Vec<RetrievalHit> {
        let rows = rows.unwrap_or_else(|| (0..self.rows() as u32).collect());
        let cands = self.score_rows(query, &rows, k);
        self.to_hits(cands)
    }

    /// Best-first total order: score descending, then passage id ascending,
    /// then row index (stabilizes duplicate ids; output is unaffected).
    fn better(&self, a: &(f32, u32), b: &(f32, u32)) -> Ordering {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.matrix.id(a.1 as usize).cmp(self.matrix.id(b.1 as usize)))
            .then_with(|| a.1.cmp(&b.1))
    }

    fn top_k(&self, mut cands: Vec<(f32, u32)>, k: usize) -> Vec<(f32, u32)> {
        if cands.len() > k {
            cands.select_nth_unstable_by(k - 1, |a, b| self.better(a, b));
            cands.truncate(k);
        }
        cands.sort_unstable_by(|a, b| self.better(a, b));
        cands
    }

    fn score_rows_seq(&self, query: &[f32], rows: &[u32], k: usize) -> Vec<(f32, u32)> {
        let cands: Vec<(f32, u32)> = rows
            .iter()
            .map(|&row| (dot(query, self.matrix.row(row as usize)), row))
            .collect();
        self.top_k(cands, k)
    }

    #[cfg(feature = "parallel")]
    fn score_rows(&self, query: &[f32], rows: &[u32], k: usize) -> Vec<(f32, u32)> {
        use rayon::prelude::*;
        rows.par_chunks(4096)
            .map(|chunk| self.score_rows_seq(query, chunk, k))
            .reduce(Vec::new, |mut a, b| {
                a.extend(b);
                self.top_k(a, k)
            })
    }

    #[cfg(not(feature = "parallel"))]
    fn score_rows(&self, query: &[f32], rows: &[u32], k: usize) -> Vec<(f32, u32)> {
        self.score_rows_seq(query, rows, k)
    }

    fn to_hits(&self, cands: Vec<(f32, u32)>) -> Vec<RetrievalHit> {
        cands
            .into_iter()
            .map(|(score, row)| RetrievalHit {
                passage_id: self.matrix.id(row as usize).to_string(),
                score,
            })
            .collect()
    }

    /// Persist as the embedding binary plus an optional partition section.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = BufWriter::new(file);
        model::io_write_embeddings(&self.matrix, &mut writer).map_err(|e| Error::io(path, e))?;
        if let Some(table) = &self.partitions {
            let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
                w.write_all(PARTITION_MAGIC)?;
                w.write_u32::<LittleEndian>(table.members.len() as u32)?;
                for value in &table.centroids {
                    w.write_f32::<LittleEndian>(*value)?;
                }
                for members in &table.members {
                    w.write_u32::<LittleEndian>(members.len() as u32)?;
                    for row in members {
                        w.write_u32::<LittleEndian>(*row)?;
                    }
                }
                Ok(())
            };
            write(&mut writer).map_err(|e| Error::io(path, e))?;
        }
        writer.flush().map_err(|e| Error::io(path, e))
    }

    /// Load an index persisted by [`save`], validating that partition
    /// member lists cover every row exactly once.
    pub fn load(path: impl AsRef<Path>) -> Result<InnerProductIndex> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let total_len = file.metadata().map_err(|e| Error::io(path, e))?.len();
        let mut reader = BufReader::new(file);
        let matrix = model::io_read_embeddings(&mut reader, path, total_len)?;

        let mut magic = [0u8; 4];
        let partitions = match reader.read_exact(&mut magic) {
            Err(_) => None,
            Ok(()) => {
                if &magic != PARTITION_MAGIC {
                    return Err(Error::Format {
                        path: path.to_path_buf(),
                        detail: format!("bad partition magic {magic:?}"),
                    });
                }
                let bad = |detail: &str| Error::Format {
                    path: path.to_path_buf(),
                    detail: detail.to_string(),
                };
                let p = reader
                    .read_u32::<LittleEndian>()
                    .map_err(|_| bad("truncated partition header"))? as usize;
                let mut centroids = vec![0f32; p * matrix.dim()];
                reader
                    .read_f32_into::<LittleEndian>(&mut centroids)
                    .map_err(|_| bad("truncated centroid block"))?;
                let mut members = Vec::with_capacity(p);
                for _ in 0..p {
                    let len = reader
                        .read_u32::<LittleEndian>()
                        .map_err(|_| bad("truncated member list"))? as usize;
                    let mut rows = vec![0u32; len];
                    reader
                        .read_u32_into::<LittleEndian>(&mut rows)
                        .map_err(|_| bad("truncated member list"))?;
                    members.push(rows);
                }
                let mut seen = vec![false; matrix.rows()];
                for rows in &members {
                    for &row in rows {
                        let row = row as usize;
                        if row >= seen.len() || seen[row] {
                            return Err(bad("partition lists do not form an exact partition"));
                        }
                        seen[row] = true;
                    }
                }
                if seen.iter().any(|covered| !covered) {
                    return Err(bad("partition lists do not cover all rows"));
                }
                Some(PartitionTable { centroids, members })
            }
        };
        Ok(InnerProductIndex { matrix, partitions })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_matrix() -> EmbeddingMatrix {
        let ids = vec!["e1".to_string(), "e2".to_string(), "e3".to_string()];
        let data = vec![
            1.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, //
            0.0, 0.0, 1.0,
        ];
        EmbeddingMatrix::new(3, ids, data).unwrap()
    }

    #[test]
    fn basis_query_hits_matching_row() {
        let index = InnerProductIndex::build(basis_matrix(), None, 0).unwrap();
        let hits = index.search(&[0.0, 1.0, 0.0], 1).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].passage_id, "e2");
        assert_eq!(hits[0].score, 1.0);
    }

    #[test]
    fn empty_matrix_rejected() {
        let matrix = EmbeddingMatrix::new(3, vec![], vec![]).unwrap();
        assert!(matches!(
            InnerProductIndex::build(matrix, None, 0),
            Err(Error::EmptyMatrix)
        ));
    }

    #[test]
    fn identical_rows_tie_break_by_id() {
        let ids = vec!["b".to_string(), "a".to_string()];
        let data = vec![1.0, 1.0, 1.0, 1.0];
        let matrix = EmbeddingMatrix::new(2, ids, data).unwrap();
        let index = InnerProductIndex::build(matrix, None, 0).unwrap();
        let hits = index.search(&[1.0, 1.0], 2).unwrap();
        assert_eq!(hits[0].passage_id, "a");
        assert_eq!(hits[1].passage_id, "b");
    }

    #[test]
    fn dim_mismatch_names_both_dims() {
        let index = InnerProductIndex::build(basis_matrix(), None, 0).unwrap();
        match index.search(&[1.0, 0.0], 1) {
            Err(Error::DimMismatch { expected, actual }) => {
                assert_eq!((expected, actual), (3, 2));
            }
            other => panic!("expected dim mismatch, got {other:?}"),
        }
    }

    #[test]
    fn k_zero_rejected() {
        let index = InnerProductIndex::build(basis_matrix(), None, 0).unwrap();
        assert!(index.search(&[1.0, 0.0, 0.0], 0).is_err());
    }

    #[test]
    fn k_larger_than_rows_returns_all() {
        let index = InnerProductIndex::build(basis_matrix(), None, 0).unwrap();
        let hits = index.search(&[0.5, 0.25, 0.1], 10).unwrap();
        assert_eq!(hits.len(), 3);
        assert_eq!(hits[0].passage_id, "e1");
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let index = InnerProductIndex::build(basis_matrix(), None, 0).unwrap();
        let q = [0.3, -0.2, 0.9];
        assert_eq!(
            index.search(&q, 2).unwrap(),
            index.search_sequential(&q, 2).unwrap()
        );
    }
}
