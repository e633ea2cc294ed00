//! Index stage: build the inner-product index, optionally partitioned.

use std::path::PathBuf;

use clap::Args;

use oeq_core::index::InnerProductIndex;
use oeq_core::model::load_embeddings;

use crate::commands::require_file;
use crate::config::PipelineConfig;
use crate::{save_atomic, CliError};

#[derive(Debug, Args, Clone, Default)]
pub struct IndexArgs {
    /// Embedding binary to index.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Index output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Partition count for inverted-list mode (omit for exact-only).
    #[arg(long)]
    pub partitions: Option<usize>,
    /// Seed for the partitioning k-means.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(args: &IndexArgs, config: &PipelineConfig) -> Result<(), CliError> {
    require_file("embeddings", &args.embeddings)?;
    let partitions = args.partitions.or_else(|| {
        (config.retrieval.partitions > 0).then_some(config.retrieval.partitions)
    });
    let seed = args.seed.unwrap_or(config.seed);

    let build = || -> anyhow::Result<()> {
        let matrix = load_embeddings(&args.embeddings)?;
        let index = InnerProductIndex::build(matrix, partitions, seed)?;
        if let Some(parent) = args.out.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        save_atomic(&args.out, |p| index.save(p))?;
        log::info!(
            "indexed {} rows ({} partitions) into {}",
            index.rows(),
            index.partition_count().unwrap_or(0),
            args.out.display()
        );
        Ok(())
    };
    build().map_err(|e| CliError::stage("index", e))
}
