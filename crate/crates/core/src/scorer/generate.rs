//! Synthetic question generation from corpus passages.
//!
//! A [`GenerationClient`] turns a prompt into text; the generator asks it
//! for one multiple-choice question per passage, parses the reply, validates
//! it, and applies a difficulty filter. Client failures and unparseable
//! replies never abort the run: they are recorded and generation continues.

use serde::{Deserialize, Serialize};

use crate::augment::AugmentedQuery;
use crate::embed::HashEmbedder;
use crate::error::{Error, Result};
use crate::model::{CorpusPassage, GoldLabel, QuestionItem, ResponseOption};
use crate::scorer::{BaselineCosineScorer, Scorer};

/// Prompt sent to the generation client. `{n}`, `{title}` and `{passage}`
/// are filled per passage.
pub const DEFAULT_GENERATION_PROMPT: &str = "Write one open-ended question with {n} candidate \
responses about the passage below, exactly one of them correct. Reply with a single JSON object \
with keys \"prompt\", \"options\" (list of {\"id\", \"text\"}) and \"answer\" (the correct id).\n\
Title: {title}\nPassage: {passage}";

/// What the generation client must reply with, as JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratedPayload {
    pub prompt: String,
    pub options: Vec<ResponseOption>,
    pub answer: String,
}

/// Turns a prompt into generated text. A deterministic stub ships for
/// offline use and tests; [`super::RemoteGenerationClient`] calls out to a
/// real model.
pub trait GenerationClient {
    fn generate(&self, prompt: &str) -> Result<String>;
}

/// Post-generation filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterPolicy {
    /// Keep everything.
    None,
    /// Drop questions the offline baseline scorer already answers correctly
    /// at rank 1 -- they are too easy to be informative.
    DropIfBaselineCorrect,
}

/// Generation settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationTask {
    pub prompt_template: String,
    pub options_per_question: usize,
    pub filter: FilterPolicy,
}

impl Default for GenerationTask {
    fn default() -> Self {
        GenerationTask {
            prompt_template: DEFAULT_GENERATION_PROMPT.to_string(),
            options_per_question: 5,
            filter: FilterPolicy::None,
        }
    }
}

impl GenerationTask {
    pub fn validate(&self) -> Result<()> {
        if self.options_per_question < 2 {
            return Err(Error::InvalidArg(
                "options_per_question must be at least 2".into(),
            ));
        }
        Ok(())
    }

    fn render_prompt(&self, passage: &CorpusPassage) -> String {
        self.prompt_template
            .replace("{n}", &self.options_per_question.to_string())
            .replace("{title}", &passage.title)
            .replace("{passage}", &passage.body)
    }
}

/// A kept question together with the passage it was generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedQuestion {
    pub question: QuestionItem,
    pub source_passage: String,
}

/// One passage that produced no question, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedItem {
    pub passage_id: String,
    pub reason: String,
}

/// Outcome of a generation run. `items` holds only fully valid questions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GenerationReport {
    pub items: Vec<GeneratedQuestion>,
    pub skipped: Vec<SkippedItem>,
    /// Items dropped by the difficulty filter.
    pub filtered_out: usize,
    /// Subset of `skipped` caused by client failures.
    pub client_failures: usize,
}

/// Generate one question per passage through `client`, keeping partial
/// results when individual generations fail.
pub fn generate_synthetic(
    task: &GenerationTask,
    client: &dyn GenerationClient,
    passages: &[CorpusPassage],
) -> Result<GenerationReport> {
    task.validate()?;
    if passages.is_empty() {
        return Err(Error::InvalidArg("no passages to generate from".into()));
    }
    let baseline = BaselineCosineScorer::new(HashEmbedder::default());

    let mut report = GenerationReport::default();
    for passage in passages {
        let text = match client.generate(&task.render_prompt(passage)) {
            Ok(text) => text,
            Err(e) => {
                log::warn!("generation failed for passage `{}`: {e}", passage.id);
                report.client_failures += 1;
                report.skipped.push(SkippedItem {
                    passage_id: passage.id.clone(),
                    reason: format!("client failure: {e}"),
                });
                continue;
            }
        };
        let question = match parse_generated(&text, passage, task.options_per_question) {
            Ok(q) => q,
            Err(reason) => {
                log::warn!("skipping generation for `{}`: {reason}", passage.id);
                report.skipped.push(SkippedItem {
                    passage_id: passage.id.clone(),
                    reason,
                });
                continue;
            }
        };
        if task.filter == FilterPolicy::DropIfBaselineCorrect
            && baseline_answers_correctly(&baseline, &question)
        {
            report.filtered_out += 1;
            continue;
        }
        report.items.push(GeneratedQuestion {
            question,
            source_passage: passage.id.clone(),
        });
    }
    Ok(report)
}

fn parse_generated(
    text: &str,
    passage: &CorpusPassage,
    expected_options: usize,
) -> std::result::Result<QuestionItem, String> {
    let payload: GeneratedPayload =
        serde_json::from_str(text).map_err(|e| format!("unparseable generation: {e}"))?;
    if payload.options.len() != expected_options {
        return Err(format!(
            "generation produced {} options, expected {expected_options}",
            payload.options.len()
        ));
    }
    let question = QuestionItem {
        id: format!("gen-{}", passage.id),
        prompt: payload.prompt,
        options: payload.options,
        category: None,
        gold: Some(GoldLabel::SingleCorrect(payload.answer)),
    };
    question
        .validate()
        .map_err(|e| format!("generated item violates invariants: {e}"))?;
    Ok(question)
}

fn baseline_answers_correctly(baseline: &BaselineCosineScorer, question: &QuestionItem) -> bool {
    let aug = AugmentedQuery {
        question_id: question.id.clone(),
        prompt: question.prompt.clone(),
        contexts: Vec::new(),
        rendered: question.prompt.clone(),
        budget: usize::MAX,
    };
    match baseline.score(question, &aug) {
        Ok(prediction) => prediction.top1() == question.gold.as_ref().and_then(|g| g.best()),
        Err(_) => false,
    }
}

/// Deterministic offline stand-in for a text-generation model. It reads the
/// title and passage back out of the prompt (the default template labels
/// them) and emits a well-formed question whose correct response is the
/// passage's first sentence.
#[derive(Debug, Clone, Default)]
pub struct StubGenerationClient;

impl StubGenerationClient {
    fn extract<'a>(prompt: &'a str, label: &str) -> &'a str {
        prompt
            .split(label)
            .nth(1)
            .map(|rest| rest.lines().next().unwrap_or(""))
            .unwrap_or("")
            .trim()
    }
}

impl GenerationClient for StubGenerationClient {
    fn generate(&self, prompt: &str) -> Result<String> {
        let title = Self::extract(prompt, "Title:");
        let passage = match prompt.split("Passage:").nth(1) {
            Some(rest) => rest.trim(),
            None => "",
        };
        let requested: usize = Self::extract(prompt, "with ")
            .split(' ')
            .next()
            .and_then(|n| n.parse().ok())
            .unwrap_or(5);

        let first_sentence = passage
            .split('.')
            .next()
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .unwrap_or("the passage is empty");
        let reversed: Vec<&str> = first_sentence.split(' ').rev().collect();

        let mut texts = vec![
            format!("{first_sentence}."),
            format!("{}.", reversed.join(" ")),
            format!("The passage about {title} does not define this term."),
            "None of the provided statements follows from the passage.".to_string(),
        ];
        let mut filler = 1;
        while texts.len() < requested {
            texts.push(format!(
                "Generic statement {filler} about an unrelated subject."
            ));
            filler += 1;
        }
        texts.truncate(requested);

        let options: Vec<ResponseOption> = texts
            .into_iter()
            .enumerate()
            .map(|(i, text)| ResponseOption {
                id: char::from(b'A' + i as u8).to_string(),
                text,
            })
            .collect();
        let payload = GeneratedPayload {
            prompt: format!("According to the passage, what is {title}?"),
            options,
            answer: "A".to_string(),
        };
        serde_json::to_string(&payload).map_err(|e| Error::InvalidArg(e.to_string()))
    }
}
