//! Gen stage: synthetic question generation from corpus passages.

use std::path::PathBuf;
use std::time::Duration;

use clap::Args;
use serde::Serialize;

use oeq_core::model::{load_corpus, save_questions};
use oeq_core::scorer::{
    generate_synthetic, FilterPolicy, GenerationClient, GenerationTask, RemoteGenerationClient,
    SkippedItem, StubGenerationClient,
};

use crate::commands::require_file;
use crate::config::PipelineConfig;
use crate::{write_atomic, CliError};

#[derive(Debug, Args, Clone, Default)]
pub struct GenArgs {
    /// Source passages (jsonl).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Generate from the first n passages.
    #[arg(long)]
    pub n: usize,
    /// Remote text-generation endpoint; the deterministic stub runs when
    /// omitted.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Candidate responses per question.
    #[arg(long, default_value_t = 5)]
    pub options: usize,
    /// Difficulty filter: "none" or "drop-easy" (drop questions the
    /// offline baseline already answers at rank 1).
    #[arg(long, default_value = "none")]
    pub filter: String,
    /// Output questions file (jsonl).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct GenReport {
    requested: usize,
    generated: usize,
    filtered_out: usize,
    client_failures: usize,
    skipped: Vec<SkippedItem>,
    sources: Vec<SourceEntry>,
}

#[derive(Serialize)]
struct SourceEntry {
    question_id: String,
    source_passage: String,
}

pub fn run(args: &GenArgs, config: &PipelineConfig) -> Result<(), CliError> {
    require_file("corpus", &args.corpus)?;
    if args.n == 0 {
        return Err(CliError::validation("--n must be positive"));
    }
    let filter = match args.filter.as_str() {
        "none" => FilterPolicy::None,
        "drop-easy" => FilterPolicy::DropIfBaselineCorrect,
        other => {
            return Err(CliError::validation(format!(
                "filter must be \"none\" or \"drop-easy\", got {other:?}"
            )))
        }
    };
    if args.options < 2 {
        return Err(CliError::validation("--options must be at least 2"));
    }

    let generate = || -> anyhow::Result<()> {
        let corpus = load_corpus(&args.corpus)?;
        let passages: Vec<_> = corpus.into_iter().take(args.n).collect();
        let task = GenerationTask {
            options_per_question: args.options,
            filter,
            ..GenerationTask::default()
        };

        let client: Box<dyn GenerationClient> = match &args.endpoint {
            Some(endpoint) if !endpoint.is_empty() => {
                let mut remote = oeq_core::scorer::RemoteConfig::new(endpoint.clone());
                remote.timeout = Duration::from_millis(config.scorer.timeout_ms);
                remote.retries = config.scorer.retries;
                Box::new(RemoteGenerationClient::new(remote)?)
            }
            _ => Box::new(StubGenerationClient),
        };

        let report = generate_synthetic(&task, client.as_ref(), &passages)?;
        let questions: Vec<_> = report.items.iter().map(|i| i.question.clone()).collect();
        crate::save_atomic(&args.out, |p| save_questions(&questions, p))?;

        let side_report = GenReport {
            requested: passages.len(),
            generated: report.items.len(),
            filtered_out: report.filtered_out,
            client_failures: report.client_failures,
            skipped: report.skipped.clone(),
            sources: report
                .items
                .iter()
                .map(|i| SourceEntry {
                    question_id: i.question.id.clone(),
                    source_passage: i.source_passage.clone(),
                })
                .collect(),
        };
        let report_path = args.out.with_extension("report.json");
        let mut bytes = serde_json::to_vec_pretty(&side_report)?;
        bytes.push(b'\n');
        write_atomic(&report_path, &bytes)?;
        log::info!(
            "generated {} questions ({} filtered, {} skipped) into {}",
            side_report.generated,
            side_report.filtered_out,
            side_report.skipped.len(),
            args.out.display()
        );
        Ok(())
    };
    generate().map_err(|e| CliError::stage("gen", e))
}
