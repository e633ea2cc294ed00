//! Aggregate stage: teacher judgments to consensus orders and per-option
//! score reports.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;

use oeq_core::model::{load_judgments, load_questions};
use oeq_core::raters::aggregate_question;

use crate::commands::require_file;
use crate::config::PipelineConfig;
use crate::records::to_jsonl;
use crate::{write_atomic, CliError};

#[derive(Debug, Args, Clone, Default)]
pub struct AggregateArgs {
    /// Teacher judgments (jsonl).
    #[arg(long)]
    pub judgments: PathBuf,
    /// The judged questions (jsonl).
    #[arg(long)]
    pub questions: PathBuf,
    /// Output consensus file (jsonl): order plus per-option scores.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &AggregateArgs, _config: &PipelineConfig) -> Result<(), CliError> {
    require_file("judgments", &args.judgments)?;
    require_file("questions", &args.questions)?;

    let aggregate = || -> anyhow::Result<()> {
        let questions = load_questions(&args.questions)?;
        let judgments = load_judgments(&args.judgments)?;

        let mut by_question: BTreeMap<&str, Vec<&oeq_core::model::RaterJudgment>> =
            BTreeMap::new();
        for judgment in &judgments {
            by_question
                .entry(judgment.question_id.as_str())
                .or_default()
                .push(judgment);
        }
        for question_id in by_question.keys() {
            if !questions.iter().any(|q| q.id == *question_id) {
                anyhow::bail!("judgments reference unknown question `{question_id}`");
            }
        }

        // File order follows the questions file.
        let mut records = Vec::new();
        for question in &questions {
            let Some(group) = by_question.get(question.id.as_str()) else {
                log::warn!("question `{}` has no judgments; skipped", question.id);
                continue;
            };
            let owned: Vec<oeq_core::model::RaterJudgment> =
                group.iter().map(|j| (*j).clone()).collect();
            records.push(aggregate_question(question, &owned)?);
        }
        if records.is_empty() {
            anyhow::bail!("no question had judgments to aggregate");
        }
        write_atomic(&args.out, &to_jsonl(&records)?)?;
        log::info!(
            "aggregated {} questions into {}",
            records.len(),
            args.out.display()
        );
        Ok(())
    };
    aggregate().map_err(|e| CliError::stage("aggregate", e))
}
