//! Shared domain types: questions, options, judgments, predictions,
//! embeddings, and corpus passages.
//!
//! All types are immutable after construction and safe to share across
//! threads. Validation is split in two: `validate` enforces hard invariants
//! and returns an error, while `warnings` reports soft conventions (for
//! example, a question that does not carry the usual five options).

mod io;

pub use io::{
    load_corpus, load_embeddings, load_judgments, load_predictions, load_questions, save_corpus,
    save_embeddings, save_judgments, save_predictions, save_questions, EMBEDDING_MAGIC,
};
pub(crate) use io::{
    read_embeddings_from as io_read_embeddings, write_embeddings_to as io_write_embeddings,
};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Well-known category labels for the four question themes.
pub mod category {
    pub const CONCEPTS_DEFINITIONS: &str = "ConceptsDefinitions";
    pub const THEORIES_RELATIONSHIPS: &str = "TheoriesRelationships";
    pub const PHENOMENA_EFFECTS: &str = "PhenomenaEffects";
    pub const APPLICATIONS_RULES: &str = "ApplicationsRules";

    pub const ALL: [&str; 4] = [
        CONCEPTS_DEFINITIONS,
        THEORIES_RELATIONSHIPS,
        PHENOMENA_EFFECTS,
        APPLICATIONS_RULES,
    ];
}

/// One candidate response to an open-ended prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseOption {
    pub id: String,
    pub text: String,
}

/// Ground truth for a question: either a single correct option or a full
/// human consensus ordering (best first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GoldLabel {
    #[serde(rename = "correct")]
    SingleCorrect(String),
    #[serde(rename = "order")]
    HumanOrder(Vec<String>),
}

impl GoldLabel {
    /// The option considered best under this label.
    pub fn best(&self) -> Option<&str> {
        match self {
            GoldLabel::SingleCorrect(id) => Some(id),
            GoldLabel::HumanOrder(order) => order.first().map(String::as_str),
        }
    }
}

/// An open-ended prompt with its candidate responses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionItem {
    pub id: String,
    pub prompt: String,
    pub options: Vec<ResponseOption>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<GoldLabel>,
}

impl QuestionItem {
    /// Hard invariants: non-empty prompt, at least two options with unique
    /// non-empty ids and texts, and a gold label consistent with the options.
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Invariant("question id is empty".into()));
        }
        if self.prompt.is_empty() {
            return Err(Error::Invariant(format!(
                "question `{}` has an empty prompt",
                self.id
            )));
        }
        if self.options.len() < 2 {
            return Err(Error::Invariant(format!(
                "question `{}` has {} option(s); at least 2 required",
                self.id,
                self.options.len()
            )));
        }
        let mut seen = HashSet::new();
        for opt in &self.options {
            if opt.id.is_empty() {
                return Err(Error::Invariant(format!(
                    "question `{}` has an option with an empty id",
                    self.id
                )));
            }
            if opt.text.is_empty() {
                return Err(Error::Invariant(format!(
                    "question `{}` option `{}` has empty text",
                    self.id, opt.id
                )));
            }
            if !seen.insert(opt.id.as_str()) {
                return Err(Error::DuplicateId {
                    kind: "option",
                    id: opt.id.clone(),
                });
            }
        }
        match &self.gold {
            None => {}
            Some(GoldLabel::SingleCorrect(id)) => {
                if !seen.contains(id.as_str()) {
                    return Err(Error::UnknownId {
                        kind: "option",
                        id: id.clone(),
                    });
                }
            }
            Some(GoldLabel::HumanOrder(order)) => {
                let order_set: HashSet<&str> = order.iter().map(String::as_str).collect();
                if order.len() != self.options.len() || order_set != seen {
                    return Err(Error::Invariant(format!(
                        "question `{}`: gold order is not a permutation of its options",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Soft conventions worth flagging but not rejecting.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.options.len() != 5 {
            out.push(format!(
                "question `{}` has {} options (conventional format uses 5)",
                self.id,
                self.options.len()
            ));
        }
        out
    }

    pub fn option_ids(&self) -> Vec<String> {
        self.options.iter().map(|o| o.id.clone()).collect()
    }

    pub fn has_option(&self, id: &str) -> bool {
        self.options.iter().any(|o| o.id == id)
    }
}

/// One teacher's judgment for one question: the single best response and
/// the set of the three relatively better responses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaterJudgment {
    pub rater_id: String,
    pub question_id: String,
    pub top1: String,
    pub top3: Vec<String>,
}

impl RaterJudgment {
    /// Standalone invariants: exactly three distinct top3 picks containing
    /// the top1 pick.
    pub fn validate(&self) -> Result<()> {
        if self.top3.len() != 3 {
            return Err(Error::Invariant(format!(
                "judgment by `{}` on `{}` lists {} top3 picks; exactly 3 required",
                self.rater_id,
                self.question_id,
                self.top3.len()
            )));
        }
        let distinct: HashSet<&str> = self.top3.iter().map(String::as_str).collect();
        if distinct.len() != 3 {
            return Err(Error::Invariant(format!(
                "judgment by `{}` on `{}` repeats a top3 pick",
                self.rater_id, self.question_id
            )));
        }
        if !distinct.contains(self.top1.as_str()) {
            return Err(Error::Invariant(format!(
                "judgment by `{}` on `{}`: top1 `{}` is not inside top3",
                self.rater_id, self.question_id, self.top1
            )));
        }
        Ok(())
    }

    /// Full invariants against the judged question.
    pub fn validate_against(&self, question: &QuestionItem) -> Result<()> {
        self.validate()?;
        if self.question_id != question.id {
            return Err(Error::InvalidArg(format!(
                "judgment references question `{}`, expected `{}`",
                self.question_id, question.id
            )));
        }
        for id in &self.top3 {
            if !question.has_option(id) {
                return Err(Error::UnknownId {
                    kind: "option",
                    id: id.clone(),
                });
            }
        }
        Ok(())
    }
}

/// One (option id, score) entry of a ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedOption {
    pub id: String,
    pub score: f64,
}

/// A scorer's full ordering of a question's options, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPrediction {
    pub question_id: String,
    pub ranking: Vec<RankedOption>,
}

impl RankedPrediction {
    /// Build a prediction from raw per-option scores, sorting by descending
    /// score with ties broken by ascending option id.
    pub fn from_scores(question_id: impl Into<String>, mut scores: Vec<RankedOption>) -> Self {
        scores.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.id.cmp(&b.id))
        });
        RankedPrediction {
            question_id: question_id.into(),
            ranking: scores,
        }
    }

    /// Option ids in rank order.
    pub fn ranked_ids(&self) -> Vec<&str> {
        self.ranking.iter().map(|r| r.id.as_str()).collect()
    }

    pub fn top1(&self) -> Option<&str> {
        self.ranking.first().map(|r| r.id.as_str())
    }

    /// Ids of the first `k` ranked options.
    pub fn top_k(&self, k: usize) -> Vec<&str> {
        self.ranking.iter().take(k).map(|r| r.id.as_str()).collect()
    }

    /// Standalone invariants: unique ids, finite scores, non-increasing
    /// scores with ties ordered by ascending id.
    pub fn validate(&self) -> Result<()> {
        if self.ranking.is_empty() {
            return Err(Error::Invariant(format!(
                "prediction for `{}` has an empty ranking",
                self.question_id
            )));
        }
        let mut seen = HashSet::new();
        for entry in &self.ranking {
            if !entry.score.is_finite() {
                return Err(Error::Invariant(format!(
                    "prediction for `{}`: non-finite score for option `{}`",
                    self.question_id, entry.id
                )));
            }
            if !seen.insert(entry.id.as_str()) {
                return Err(Error::DuplicateId {
                    kind: "option",
                    id: entry.id.clone(),
                });
            }
        }
        for pair in self.ranking.windows(2) {
            if pair[0].score < pair[1].score {
                return Err(Error::Invariant(format!(
                    "prediction for `{}`: scores increase at option `{}`",
                    self.question_id, pair[1].id
                )));
            }
            if pair[0].score == pair[1].score && pair[0].id > pair[1].id {
                return Err(Error::Invariant(format!(
                    "prediction for `{}`: tie between `{}` and `{}` not in ascending id order",
                    self.question_id, pair[0].id, pair[1].id
                )));
            }
        }
        Ok(())
    }

    /// Full invariants against the predicted question: the ranking must be
    /// a permutation of the question's option ids.
    pub fn validate_against(&self, question: &QuestionItem) -> Result<()> {
        self.validate()?;
        let ranked: HashSet<&str> = self.ranking.iter().map(|r| r.id.as_str()).collect();
        let options: HashSet<&str> = question.options.iter().map(|o| o.id.as_str()).collect();
        if ranked != options {
            return Err(Error::Invariant(format!(
                "prediction for `{}` is not a permutation of the question's options",
                self.question_id
            )));
        }
        Ok(())
    }
}

/// Where a corpus passage came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PassageSource {
    Wikipedia,
    Wikistem,
    Other,
}

/// One retrievable text unit of the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusPassage {
    pub id: String,
    pub title: String,
    pub body: String,
    pub source: PassageSource,
}

impl CorpusPassage {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Invariant("passage id is empty".into()));
        }
        if self.body.is_empty() {
            return Err(Error::Invariant(format!(
                "passage `{}` has an empty body",
                self.id
            )));
        }
        Ok(())
    }
}

/// A dense row-major matrix of 32-bit embeddings with one string id per row.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dim: usize,
    ids: Vec<String>,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    /// `data` is row-major with `ids.len() * dim` entries, all finite.
    pub fn new(dim: usize, ids: Vec<String>, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArg("embedding dim must be positive".into()));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::InvalidArg(format!(
                "embedding payload has {} values; {} rows x {} dims requires {}",
                data.len(),
                ids.len(),
                dim,
                ids.len() * dim
            )));
        }
        let matrix = EmbeddingMatrix { dim, ids, data };
        matrix.check_finite()?;
        Ok(matrix)
    }

    pub fn check_finite(&self) -> Result<()> {
        for (row, chunk) in self.data.chunks_exact(self.dim).enumerate() {
            if chunk.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row_id: self.ids[row].clone(),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, row: usize) -> &str {
        &self.ids[row]
    }

    pub fn row(&self, row: usize) -> &[f32] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.ids
            .iter()
            .map(String::as_str)
            .zip(self.data.chunks_exact(self.dim))
    }

    /// Row index of `id`, scanning in order. Build your own map for bulk joins.
    pub fn position_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// L2-normalize every row in place; zero rows are left untouched.
    pub fn normalize_rows(&mut self) {
        for chunk in self.data.chunks_exact_mut(self.dim) {
            let norm = chunk.iter().map(|v| (*v as f64) * (*v as f64)).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in chunk.iter_mut() {
                    *v = (*v as f64 / norm) as f32;
                }
            }
        }
    }
}

/// Collapse all whitespace runs to single spaces and trim the ends.
///
/// This is the only text cleaning applied anywhere in the toolkit.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
