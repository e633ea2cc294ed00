//! Augment stage: render each question with its retrieved contexts under
//! the character budget.

use std::collections::HashMap;
use std::path::PathBuf;

use clap::Args;

use oeq_core::augment::{augment_query, corpus_lookup, QueryTemplate};
use oeq_core::model::{load_corpus, load_questions};

use crate::commands::require_file;
use crate::config::PipelineConfig;
use crate::records::{load_hits, to_jsonl};
use crate::{write_atomic, CliError};

#[derive(Debug, Args, Clone, Default)]
pub struct AugmentArgs {
    /// Questions (jsonl).
    #[arg(long)]
    pub questions: PathBuf,
    /// Hits file from `retrieve`.
    #[arg(long)]
    pub hits: PathBuf,
    /// Corpus passages the hits refer to (jsonl).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Rendered-query character budget.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Template file with {contexts}, {prompt}, {options} placeholders.
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Output augmented queries (jsonl).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &AugmentArgs, config: &PipelineConfig) -> Result<(), CliError> {
    require_file("questions", &args.questions)?;
    require_file("hits", &args.hits)?;
    require_file("corpus", &args.corpus)?;
    let budget = args.budget.unwrap_or(config.augmentation.budget);
    let template_path = args
        .template
        .clone()
        .or_else(|| config.augmentation.template.clone());
    if let Some(t) = &template_path {
        require_file("template", t)?;
    }

    let augment = || -> anyhow::Result<()> {
        let template = match &template_path {
            Some(path) => QueryTemplate::parse(&std::fs::read_to_string(path)?)?,
            None => QueryTemplate::default(),
        };
        let questions = load_questions(&args.questions)?;
        let corpus = load_corpus(&args.corpus)?;
        let lookup = corpus_lookup(&corpus);
        let hits_by_question: HashMap<String, _> = load_hits(&args.hits)?
            .into_iter()
            .map(|r| (r.question_id.clone(), r.hits))
            .collect();

        let empty = Vec::new();
        let mut records = Vec::with_capacity(questions.len());
        for question in &questions {
            let hits = hits_by_question.get(&question.id).unwrap_or(&empty);
            records.push(augment_query(question, hits, &lookup, budget, &template)?);
        }
        write_atomic(&args.out, &to_jsonl(&records)?)?;
        log::info!(
            "augmented {} questions into {}",
            records.len(),
            args.out.display()
        );
        Ok(())
    };
    augment().map_err(|e| CliError::stage("augment", e))
}
