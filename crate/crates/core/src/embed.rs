//! Deterministic feature-hashing text embedder.
//!
//! The pipeline treats embeddings as an ingestion input; any external model
//! can supply them through the embedding binary format. This embedder exists
//! so the whole pipeline runs offline and reproducibly: it hashes word
//! unigrams and character n-grams into a fixed number of signed buckets and
//! L2-normalizes the result, so inner products behave like cosine
//! similarity. Output depends only on the input text and the parameters.

use crate::model::{normalize_whitespace, EmbeddingMatrix};

/// FNV-1a, fixed here so bucket assignment never varies across platforms
/// or std releases.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Hashing embedder over word unigrams and character n-grams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashEmbedder {
    dim: usize,
    ngram: usize,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder { dim: 256, ngram: 3 }
    }
}

impl HashEmbedder {
    /// `dim` is the bucket count (vector length); `ngram` the character
    /// window size. Both must be positive.
    pub fn new(dim: usize, ngram: usize) -> Self {
        assert!(dim > 0, "embedder dim must be positive");
        assert!(ngram > 0, "embedder ngram must be positive");
        HashEmbedder { dim, ngram }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn bump(&self, accum: &mut [f64], key: &[u8]) {
        let h = fnv1a(key);
        let bucket = (h % self.dim as u64) as usize;
        // Top hash bit picks the sign; keeps colliding features from
        // piling up in one direction.
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        accum[bucket] += sign;
    }

    /// Embed one text. Empty or whitespace-only text maps to the zero vector.
    pub fn embed(&self, text: &str) -> Vec<f32> {
        let normalized = normalize_whitespace(text).to_lowercase();
        let mut accum = vec![0.0f64; self.dim];

        for word in normalized.split(' ').filter(|w| !w.is_empty()) {
            let mut key = Vec::with_capacity(word.len() + 2);
            key.extend_from_slice(b"w:");
            key.extend_from_slice(word.as_bytes());
            self.bump(&mut accum, &key);
        }

        let chars: Vec<char> = normalized.chars().collect();
        if chars.len() >= self.ngram {
            for window in chars.windows(self.ngram) {
                let gram: String = window.iter().collect();
                let mut key = Vec::with_capacity(gram.len() + 2);
                key.extend_from_slice(b"c:");
                key.extend_from_slice(gram.as_bytes());
                self.bump(&mut accum, &key);
            }
        }

        let norm = accum.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            accum.iter().map(|v| (v / norm) as f32).collect()
        } else {
            vec![0.0; self.dim]
        }
    }

    /// Embed many texts into a matrix, one row per (id, text) pair, in order.
    pub fn embed_all<'a, I>(&self, items: I) -> EmbeddingMatrix
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let (ids, texts): (Vec<String>, Vec<String>) = items
            .into_iter()
            .map(|(id, text)| (id.to_string(), text.to_string()))
            .unzip();
        let rows = embed_rows(self, &texts);
        let mut data = Vec::with_capacity(ids.len() * self.dim);
        for row in rows {
            data.extend_from_slice(&row);
        }
        EmbeddingMatrix::new(self.dim, ids, data).expect("hash embedder output is always finite")
    }
}

#[cfg(feature = "parallel")]
fn embed_rows(embedder: &HashEmbedder, texts: &[String]) -> Vec<Vec<f32>> {
    use rayon::prelude::*;
    texts.par_iter().map(|t| embedder.embed(t)).collect()
}

#[cfg(not(feature = "parallel"))]
fn embed_rows(embedder: &HashEmbedder, texts: &[String]) -> Vec<Vec<f32>> {
    texts.iter().map(|t| embedder.embed(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_is_deterministic() {
        let e = HashEmbedder::default();
        assert_eq!(e.embed("the Roche limit"), e.embed("the  Roche\nlimit"));
    }

    #[test]
    fn embedding_is_unit_norm() {
        let e = HashEmbedder::default();
        let v = e.embed("redox reactions transfer electrons");
        let norm: f64 = v.iter().map(|x| (*x as f64).powi(2)).sum::<f64>();
        assert!((norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_text_is_zero_vector() {
        let e = HashEmbedder::new(16, 3);
        assert_eq!(e.embed("   "), vec![0.0; 16]);
    }

    #[test]
    fn similar_texts_score_higher_than_unrelated() {
        let e = HashEmbedder::default();
        let a = e.embed("oxidation of iron produces rust on the surface");
        let b = e.embed("rust forms when oxidation attacks iron surfaces");
        let c = e.embed("the violin concerto premiered in vienna last spring");
        let dot = |x: &[f32], y: &[f32]| -> f64 {
            x.iter().zip(y).map(|(p, q)| (*p as f64) * (*q as f64)).sum()
        };
        assert!(dot(&a, &b) > dot(&a, &c));
    }

    #[test]
    fn embed_all_preserves_order() {
        let e = HashEmbedder::new(32, 3);
        let m = e.embed_all([("x", "alpha"), ("y", "beta")]);
        assert_eq!(m.ids(), &["x".to_string(), "y".to_string()]);
        assert_eq!(m.row(0), e.embed("alpha").as_slice());
        assert_eq!(m.row(1), e.embed("beta").as_slice());
    }
}
