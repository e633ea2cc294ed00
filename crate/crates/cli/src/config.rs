//! Declarative pipeline configuration (TOML), with per-flag overrides
//! applied by the individual subcommands. Flags always win.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_seed() -> u64 {
    42
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("artifacts")
}
fn default_dim() -> usize {
    256
}
fn default_ngram() -> usize {
    3
}
fn default_true() -> bool {
    true
}
fn default_k() -> usize {
    10
}
fn default_budget() -> usize {
    6000
}
fn default_scorer_kind() -> String {
    "baseline".into()
}
fn default_timeout_ms() -> u64 {
    10_000
}
fn default_retries() -> u32 {
    2
}
fn default_concurrency() -> usize {
    4
}
fn default_metrics() -> Vec<String> {
    ["map@3", "ndcg", "map", "top1", "top3"]
        .into_iter()
        .map(String::from)
        .collect()
}
fn default_map_mode() -> String {
    "standard".into()
}
fn default_reduce_dim() -> usize {
    16
}
fn default_k_min() -> usize {
    2
}
fn default_k_max() -> usize {
    10
}
fn default_cluster_seeds() -> usize {
    10
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus: Option<PathBuf>,
    pub questions: Option<PathBuf>,
    pub judgments: Option<PathBuf>,
    /// Externally produced corpus embeddings; when set, ingest validates
    /// and adopts them instead of running the built-in embedder.
    pub corpus_embeddings: Option<PathBuf>,
    /// Externally produced question embeddings, same contract.
    pub query_embeddings: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub ngram: usize,
    /// L2-normalize rows at ingest so inner product behaves like cosine.
    pub normalize: bool,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dim: default_dim(),
            ngram: default_ngram(),
            normalize: default_true(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RetrievalConfig {
    pub k: usize,
    /// 0 builds an exact-only index.
    pub partitions: usize,
    /// 0 searches exhaustively even on a partitioned index.
    pub nprobe: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            k: default_k(),
            partitions: 0,
            nprobe: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentationConfig {
    pub budget: usize,
    /// Template file with `{contexts}`, `{prompt}`, `{options}`; the
    /// built-in layout is used when unset.
    pub template: Option<PathBuf>,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        AugmentationConfig {
            budget: default_budget(),
            template: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScorerConfig {
    /// "baseline" or "remote".
    pub kind: String,
    pub endpoint: Option<String>,
    pub timeout_ms: u64,
    pub retries: u32,
    /// Concurrent in-flight scoring calls.
    pub concurrency: usize,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            kind: default_scorer_kind(),
            endpoint: None,
            timeout_ms: default_timeout_ms(),
            retries: default_retries(),
            concurrency: default_concurrency(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub metrics: Vec<String>,
    pub by_category: bool,
    /// "standard" or "paper-literal"; the latter reports both divisors.
    pub map_mode: String,
    /// 0 means "number of options per question".
    pub ndcg_k: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            metrics: default_metrics(),
            by_category: default_true(),
            map_mode: default_map_mode(),
            ndcg_k: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterConfig {
    /// Run the clustering stage as part of `run`.
    pub enabled: bool,
    /// 0 clusters the raw embeddings without reduction.
    pub reduce_dim: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub seeds: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            enabled: false,
            reduce_dim: default_reduce_dim(),
            k_min: default_k_min(),
            k_max: default_k_max(),
            seeds: default_cluster_seeds(),
        }
    }
}

/// The whole pipeline in one declarative file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Global seed; fixed before any stochastic stage runs.
    pub seed: u64,
    pub out_dir: PathBuf,
    pub paths: PathsConfig,
    pub embedding: EmbeddingConfig,
    pub retrieval: RetrievalConfig,
    pub augmentation: AugmentationConfig,
    pub scorer: ScorerConfig,
    pub eval: EvalConfig,
    pub cluster: ClusterConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: default_seed(),
            out_dir: default_out_dir(),
            paths: PathsConfig::default(),
            embedding: EmbeddingConfig::default(),
            retrieval: RetrievalConfig::default(),
            augmentation: AugmentationConfig::default(),
            scorer: ScorerConfig::default(),
            eval: EvalConfig::default(),
            cluster: ClusterConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let config: PipelineConfig = toml::from_str(&text).map_err(|e| {
            CliError::validation(format!("cannot parse config {}: {e}", path.display()))
        })?;
        Ok(config)
    }

    /// Check everything that can be checked before any work starts. For a
    /// full `run`, corpus and questions must exist; referenced optional
    /// paths must exist whenever they are set.
    pub fn validate_for_run(&self) -> Result<(), CliError> {
        let require = |name: &str, path: &Option<PathBuf>| -> Result<(), CliError> {
            match path {
                None => Err(CliError::validation(format!("paths.{name} is required"))),
                Some(p) if !p.exists() => Err(CliError::validation(format!(
                    "paths.{name} does not exist: {}",
                    p.display()
                ))),
                Some(_) => Ok(()),
            }
        };
        require("corpus", &self.paths.corpus)?;
        require("questions", &self.paths.questions)?;
        for (name, path) in [
            ("judgments", &self.paths.judgments),
            ("corpus_embeddings", &self.paths.corpus_embeddings),
            ("query_embeddings", &self.paths.query_embeddings),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(CliError::validation(format!(
                        "paths.{name} does not exist: {}",
                        p.display()
                    )));
                }
            }
        }
        if let Some(template) = &self.augmentation.template {
            if !template.exists() {
                return Err(CliError::validation(format!(
                    "augmentation.template does not exist: {}",
                    template.display()
                )));
            }
        }
        self.validate_values()
    }

    pub fn validate_values(&self) -> Result<(), CliError> {
        if self.embedding.dim == 0 {
            return Err(CliError::validation("embedding.dim must be positive"));
        }
        if self.embedding.ngram == 0 {
            return Err(CliError::validation("embedding.ngram must be positive"));
        }
        if self.retrieval.k == 0 {
            return Err(CliError::validation("retrieval.k must be positive"));
        }
        if self.augmentation.budget == 0 {
            return Err(CliError::validation("augmentation.budget must be positive"));
        }
        match self.scorer.kind.as_str() {
            "baseline" => {}
            "remote" => {
                if self.scorer.endpoint.as_deref().unwrap_or("").is_empty() {
                    return Err(CliError::validation(
                        "scorer.endpoint is required when scorer.kind = \"remote\"",
                    ));
                }
            }
            other => {
                return Err(CliError::validation(format!(
                    "scorer.kind must be \"baseline\" or \"remote\", got {other:?}"
                )))
            }
        }
        match self.eval.map_mode.as_str() {
            "standard" | "paper-literal" => {}
            other => {
                return Err(CliError::validation(format!(
                    "eval.map_mode must be \"standard\" or \"paper-literal\", got {other:?}"
                )))
            }
        }
        if self.cluster.k_min < 2 || self.cluster.k_min > self.cluster.k_max {
            return Err(CliError::validation(
                "cluster k range must satisfy 2 <= k_min <= k_max",
            ));
        }
        if self.cluster.seeds == 0 {
            return Err(CliError::validation("cluster.seeds must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty_toml() {
        let config: PipelineConfig = toml::from_str("").unwrap();
        assert_eq!(config, PipelineConfig::default());
        assert_eq!(config.seed, 42);
        assert_eq!(config.retrieval.k, 10);
        assert_eq!(config.augmentation.budget, 6000);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<PipelineConfig>("nonsense = 1").is_err());
    }

    #[test]
    fn remote_scorer_requires_endpoint() {
        let mut config = PipelineConfig::default();
        config.scorer.kind = "remote".into();
        assert!(config.validate_values().is_err());
        config.scorer.endpoint = Some("http://127.0.0.1:9/score".into());
        config.validate_values().unwrap();
    }

    #[test]
    fn missing_corpus_fails_run_validation() {
        let mut config = PipelineConfig::default();
        config.paths.questions = Some(PathBuf::from("/nonexistent/q.jsonl"));
        assert!(config.validate_for_run().is_err());
    }
}
