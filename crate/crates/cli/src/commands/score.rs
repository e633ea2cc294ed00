//! Score stage: run a scorer backend over the augmented queries.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Duration;

use clap::Args;

use oeq_core::embed::HashEmbedder;
use oeq_core::model::{load_questions, save_predictions};
use oeq_core::scorer::{score_batch, RemoteConfig, ScorerSpec};

use crate::commands::require_file;
use crate::config::PipelineConfig;
use crate::{save_atomic, CliError};

#[derive(Debug, Args, Clone, Default)]
pub struct ScoreArgs {
    /// Scorer backend: "baseline" or "remote".
    #[arg(long)]
    pub scorer: Option<String>,
    /// Remote endpoint URL (required for the remote scorer).
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Augmented queries from `augment` (jsonl).
    #[arg(long)]
    pub aug: PathBuf,
    /// Questions supplying the options to rank (jsonl).
    #[arg(long)]
    pub questions: PathBuf,
    /// Output predictions (jsonl).
    #[arg(long)]
    pub out: PathBuf,
    /// Remote per-attempt timeout in milliseconds.
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Remote retry count.
    #[arg(long)]
    pub retries: Option<u32>,
    /// Concurrent in-flight scoring calls.
    #[arg(long)]
    pub concurrency: Option<usize>,
    /// Baseline embedder dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Baseline embedder n-gram size.
    #[arg(long)]
    pub ngram: Option<usize>,
}

pub fn run(args: &ScoreArgs, config: &PipelineConfig) -> Result<(), CliError> {
    require_file("augmented queries", &args.aug)?;
    require_file("questions", &args.questions)?;
    let kind = args.scorer.clone().unwrap_or_else(|| config.scorer.kind.clone());
    let concurrency = args.concurrency.unwrap_or(config.scorer.concurrency).max(1);

    let spec = match kind.as_str() {
        "baseline" => ScorerSpec::BaselineCosine {
            embedder: HashEmbedder::new(
                args.dim.unwrap_or(config.embedding.dim),
                args.ngram.unwrap_or(config.embedding.ngram),
            ),
        },
        "remote" => {
            let endpoint = args
                .endpoint
                .clone()
                .or_else(|| config.scorer.endpoint.clone())
                .filter(|e| !e.is_empty())
                .ok_or_else(|| {
                    CliError::validation("--endpoint is required for the remote scorer")
                })?;
            let mut remote = RemoteConfig::new(endpoint);
            remote.timeout = Duration::from_millis(args.timeout_ms.unwrap_or(config.scorer.timeout_ms));
            remote.retries = args.retries.unwrap_or(config.scorer.retries);
            ScorerSpec::Remote(remote)
        }
        other => {
            return Err(CliError::validation(format!(
                "unknown scorer {other:?}; expected \"baseline\" or \"remote\""
            )))
        }
    };

    let score = || -> anyhow::Result<()> {
        let scorer = spec.build()?;
        let questions = load_questions(&args.questions)?;
        let by_id: HashMap<&str, &oeq_core::model::QuestionItem> =
            questions.iter().map(|q| (q.id.as_str(), q)).collect();
        let augmented = crate::records::load_augmented(&args.aug)?;

        let mut items = Vec::with_capacity(augmented.len());
        for aug in &augmented {
            let question = by_id.get(aug.question_id.as_str()).ok_or_else(|| {
                anyhow::anyhow!("augmented query references unknown question `{}`", aug.question_id)
            })?;
            items.push((*question, aug));
        }
        let predictions = score_batch(scorer.as_ref(), &items, concurrency)?;
        save_atomic(&args.out, |p| save_predictions(&predictions, &questions, p))?;
        log::info!(
            "scored {} questions with {kind} into {}",
            predictions.len(),
            args.out.display()
        );
        Ok(())
    };
    score().map_err(|e| CliError::stage("score", e))
}
