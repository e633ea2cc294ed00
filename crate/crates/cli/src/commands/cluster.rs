//! Cluster stage: optional PCA reduction, k sweep with elbow and
//! silhouette, validity indices, and per-cluster keywords.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use oeq_core::cluster::{
    cluster_keywords, cluster_validity, kmeans, pca_reduce, select_k, ClusterValidity,
    KSelectionReport,
};
use oeq_core::model::{load_embeddings, load_questions};

use crate::commands::require_file;
use crate::config::PipelineConfig;
use crate::{write_atomic, CliError};

#[derive(Debug, Args, Clone, Default)]
pub struct ClusterArgs {
    /// Embeddings to cluster (one row per question).
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Reduce to this many dimensions first; 0 clusters raw embeddings.
    #[arg(long)]
    pub reduce_dim: Option<usize>,
    /// Inclusive k sweep, e.g. "2..10".
    #[arg(long)]
    pub k_range: Option<String>,
    /// Seeded restarts per k.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Base seed of the sweep.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Questions file for keyword extraction over prompts.
    #[arg(long)]
    pub questions: Option<PathBuf>,
    /// Output report (json).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct ClusterReport {
    rows: usize,
    dim: usize,
    reduce_dim: Option<usize>,
    chosen_k: usize,
    selection: KSelectionReport,
    validity: ClusterValidity,
    assignments: BTreeMap<String, usize>,
    keywords: BTreeMap<usize, Vec<String>>,
}

fn parse_k_range(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split("..").collect();
    let err = || CliError::validation(format!("k range must look like \"2..10\", got {text:?}"));
    if parts.len() != 2 {
        return Err(err());
    }
    let lo: usize = parts[0].parse().map_err(|_| err())?;
    let hi: usize = parts[1].parse().map_err(|_| err())?;
    if lo < 2 || lo > hi {
        return Err(err());
    }
    Ok((lo, hi))
}

pub fn run(args: &ClusterArgs, config: &PipelineConfig) -> Result<(), CliError> {
    require_file("embeddings", &args.embeddings)?;
    if let Some(q) = &args.questions {
        require_file("questions", q)?;
    }
    let (k_min, k_max) = match &args.k_range {
        Some(text) => parse_k_range(text)?,
        None => (config.cluster.k_min, config.cluster.k_max),
    };
    let seeds = args.seeds.unwrap_or(config.cluster.seeds);
    let seed = args.seed.unwrap_or(config.seed);
    let reduce_dim = args.reduce_dim.unwrap_or(config.cluster.reduce_dim);
    if seeds == 0 {
        return Err(CliError::validation("seeds must be positive"));
    }

    let cluster = || -> anyhow::Result<()> {
        let raw = load_embeddings(&args.embeddings)?;
        let (matrix, reduced_to) = if reduce_dim > 0 && reduce_dim < raw.dim().min(raw.rows()) {
            (pca_reduce(&raw, reduce_dim)?, Some(reduce_dim))
        } else {
            (raw, None)
        };

        let k_max = k_max.min(matrix.rows().saturating_sub(1));
        if k_max < k_min {
            anyhow::bail!(
                "k range 2..{k_max} collapsed: only {} rows to cluster",
                matrix.rows()
            );
        }
        let selection = select_k(&matrix, k_min..=k_max, seeds, seed)?;
        let winning_seed = selection
            .table
            .iter()
            .find(|r| r.k == selection.chosen_k)
            .expect("chosen k is in the table")
            .seed;
        let model = kmeans(&matrix, selection.chosen_k, winning_seed)?;
        let validity = cluster_validity(&matrix, &model.assignments)?;

        let assignments: BTreeMap<String, usize> = matrix
            .ids()
            .iter()
            .cloned()
            .zip(model.assignments.iter().copied())
            .collect();

        let keywords = match &args.questions {
            None => BTreeMap::new(),
            Some(path) => {
                let questions = load_questions(path)?;
                let prompt_of: BTreeMap<&str, &str> = questions
                    .iter()
                    .map(|q| (q.id.as_str(), q.prompt.as_str()))
                    .collect();
                let texts: Vec<String> = matrix
                    .ids()
                    .iter()
                    .map(|id| prompt_of.get(id.as_str()).copied().unwrap_or("").to_string())
                    .collect();
                cluster_keywords(&texts, &model.assignments, 5)?
                    .into_iter()
                    .collect()
            }
        };

        let report = ClusterReport {
            rows: matrix.rows(),
            dim: matrix.dim(),
            reduce_dim: reduced_to,
            chosen_k: selection.chosen_k,
            selection,
            validity,
            assignments,
            keywords,
        };
        let mut bytes = serde_json::to_vec_pretty(&report)?;
        bytes.push(b'\n');
        write_atomic(&args.out, &bytes)?;
        log::info!(
            "clustered {} rows into k={} ({})",
            report.rows,
            report.chosen_k,
            args.out.display()
        );
        Ok(())
    };
    cluster().map_err(|e| CliError::stage("cluster", e))
}
