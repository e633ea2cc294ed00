//! Retrieve stage: top-k passages per query embedding.

use std::path::PathBuf;

use clap::Args;

use oeq_core::index::InnerProductIndex;
use oeq_core::model::load_embeddings;

use crate::commands::require_file;
use crate::config::PipelineConfig;
use crate::records::{to_jsonl, HitsRecord};
use crate::{write_atomic, CliError};

#[derive(Debug, Args, Clone, Default)]
pub struct RetrieveArgs {
    /// Index file produced by `index`.
    #[arg(long)]
    pub index: PathBuf,
    /// Query embeddings, one row per question.
    #[arg(long)]
    pub query_embeddings: PathBuf,
    /// Hits per query.
    #[arg(long)]
    pub k: Option<usize>,
    /// Probe this many partitions (requires a partitioned index; omit for
    /// exact search).
    #[arg(long)]
    pub nprobe: Option<usize>,
    /// Output hits file (jsonl).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &RetrieveArgs, config: &PipelineConfig) -> Result<(), CliError> {
    require_file("index", &args.index)?;
    require_file("query embeddings", &args.query_embeddings)?;
    let k = args.k.unwrap_or(config.retrieval.k);
    let nprobe = args
        .nprobe
        .or_else(|| (config.retrieval.nprobe > 0).then_some(config.retrieval.nprobe));
    if k == 0 {
        return Err(CliError::validation("k must be positive"));
    }

    let retrieve = || -> anyhow::Result<()> {
        let index = InnerProductIndex::load(&args.index)?;
        let queries = load_embeddings(&args.query_embeddings)?;
        let mut records = Vec::with_capacity(queries.rows());
        for row in 0..queries.rows() {
            let query = queries.row(row);
            let hits = match nprobe {
                Some(nprobe) => index.search_probed(query, k, nprobe)?,
                None => index.search(query, k)?,
            };
            records.push(HitsRecord {
                question_id: queries.id(row).to_string(),
                hits,
            });
        }
        write_atomic(&args.out, &to_jsonl(&records)?)?;
        log::info!(
            "retrieved top-{k} for {} queries into {}",
            records.len(),
            args.out.display()
        );
        Ok(())
    };
    retrieve().map_err(|e| CliError::stage("retrieve", e))
}
