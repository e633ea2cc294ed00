//! Teacher judgment aggregation: tally Top1/Top3 votes per option, apply
//! the weighted consensus score, and derive the consensus ordering.
//!
//! The score divides by the rater count rather than a fixed 3, so the same
//! formula applies to any panel size; with three raters it reproduces the
//! usual 7/3/1 scheme exactly, with scores in [1, 7].

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GoldLabel, QuestionItem, RaterJudgment};

/// Default per-rater weights for (top1, top3-but-not-top1, outside-top3).
pub const DEFAULT_WEIGHTS: (f64, f64, f64) = (7.0, 3.0, 1.0);

/// Vote counts for one option across a question's raters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionTally {
    pub option_id: String,
    /// Raters who picked this option as the single best.
    pub top1_votes: usize,
    /// Raters who placed it in their top three but not first.
    pub top3_only_votes: usize,
    /// Raters who left it outside their top three.
    pub outside_votes: usize,
}

impl OptionTally {
    pub fn rater_count(&self) -> usize {
        self.top1_votes + self.top3_only_votes + self.outside_votes
    }
}

/// Weighted consensus score for one option.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedScore {
    pub option_id: String,
    pub score: f64,
}

/// Count Top1/Top3/outside votes per option for one question's judgments.
///
/// All judgments must reference the same question, pass their invariants,
/// come from distinct raters, and only name known options. Tallies are
/// returned in `option_ids` order, one per option.
pub fn tally(judgments: &[RaterJudgment], option_ids: &[String]) -> Result<Vec<OptionTally>> {
    if judgments.is_empty() {
        return Err(Error::InvalidArg("no judgments to tally".into()));
    }
    let question_id = &judgments[0].question_id;
    let known: HashSet<&str> = option_ids.iter().map(String::as_str).collect();
    let mut raters = HashSet::new();
    for j in judgments {
        j.validate()?;
        if &j.question_id != question_id {
            return Err(Error::InvalidArg(format!(
                "judgments mix questions `{}` and `{}`",
                question_id, j.question_id
            )));
        }
        if !raters.insert(j.rater_id.as_str()) {
            return Err(Error::DuplicateId {
                kind: "rater",
                id: j.rater_id.clone(),
            });
        }
        for id in &j.top3 {
            if !known.contains(id.as_str()) {
                return Err(Error::UnknownId {
                    kind: "option",
                    id: id.clone(),
                });
            }
        }
    }

    let rater_count = judgments.len();
    Ok(option_ids
        .iter()
        .map(|option| {
            let top1 = judgments.iter().filter(|j| &j.top1 == option).count();
            let top3 = judgments
                .iter()
                .filter(|j| j.top3.contains(option))
                .count();
            OptionTally {
                option_id: option.clone(),
                top1_votes: top1,
                top3_only_votes: top3 - top1,
                outside_votes: rater_count - top3,
            }
        })
        .collect())
}

/// Apply the weighted consensus formula to each tally. Every tally must
/// account for exactly `rater_count` votes.
pub fn aggregate_scores(tallies: &[OptionTally], rater_count: usize) -> Result<Vec<AggregatedScore>> {
    aggregate_scores_weighted(tallies, rater_count, DEFAULT_WEIGHTS)
}

/// [`aggregate_scores`] with caller-supplied weights; the default weights
/// are (7, 3, 1).
pub fn aggregate_scores_weighted(
    tallies: &[OptionTally],
    rater_count: usize,
    weights: (f64, f64, f64),
) -> Result<Vec<AggregatedScore>> {
    if rater_count == 0 {
        return Err(Error::InvalidArg("rater count must be positive".into()));
    }
    let (w_top1, w_top3, w_outside) = weights;
    tallies
        .iter()
        .map(|t| {
            if t.rater_count() != rater_count {
                return Err(Error::Invariant(format!(
                    "tally for `{}` accounts for {} raters, expected {rater_count}",
                    t.option_id,
                    t.rater_count()
                )));
            }
            let score = (w_top1 * t.top1_votes as f64
                + w_top3 * t.top3_only_votes as f64
                + w_outside * t.outside_votes as f64)
                / rater_count as f64;
            Ok(AggregatedScore {
                option_id: t.option_id.clone(),
                score,
            })
        })
        .collect()
}

/// Order options by descending score into a consensus `HumanOrder`.
///
/// Ties break by more Top1 votes, then more Top3 votes, then ascending
/// option id. `scores` and `tallies` must cover the same options.
pub fn rank_by_score(scores: &[AggregatedScore], tallies: &[OptionTally]) -> Result<GoldLabel> {
    if scores.is_empty() {
        return Err(Error::InvalidArg("no scores to rank".into()));
    }
    let mut rows: Vec<(&AggregatedScore, &OptionTally)> = scores
        .iter()
        .map(|s| {
            let tally = tallies
                .iter()
                .find(|t| t.option_id == s.option_id)
                .ok_or_else(|| Error::UnknownId {
                    kind: "option",
                    id: s.option_id.clone(),
                })?;
            Ok((s, tally))
        })
        .collect::<Result<_>>()?;
    let distinct: HashSet<&str> = rows.iter().map(|(s, _)| s.option_id.as_str()).collect();
    if distinct.len() != rows.len() || tallies.len() != rows.len() {
        return Err(Error::Invariant(
            "scores and tallies must cover each option exactly once".into(),
        ));
    }

    rows.sort_by(|(sa, ta), (sb, tb)| {
        sb.score
            .partial_cmp(&sa.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| tb.top1_votes.cmp(&ta.top1_votes))
            .then_with(|| tb.top3_only_votes.cmp(&ta.top3_only_votes))
            .then_with(|| sa.option_id.cmp(&sb.option_id))
    });
    Ok(GoldLabel::HumanOrder(
        rows.into_iter().map(|(s, _)| s.option_id.clone()).collect(),
    ))
}

/// Per-question consensus: tallies, scores, and the derived ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionConsensus {
    pub question_id: String,
    pub rater_count: usize,
    pub tallies: Vec<OptionTally>,
    pub scores: Vec<AggregatedScore>,
    /// Consensus option ids, best first.
    pub order: Vec<String>,
}

/// Run tally -> aggregate -> rank for one question, validating each
/// judgment against the question first.
pub fn aggregate_question(
    question: &QuestionItem,
    judgments: &[RaterJudgment],
) -> Result<QuestionConsensus> {
    for j in judgments {
        j.validate_against(question)?;
    }
    let option_ids = question.option_ids();
    let tallies = tally(judgments, &option_ids)?;
    let scores = aggregate_scores(&tallies, judgments.len())?;
    let order = match rank_by_score(&scores, &tallies)? {
        GoldLabel::HumanOrder(order) => order,
        GoldLabel::SingleCorrect(_) => unreachable!("rank_by_score returns an order"),
    };
    Ok(QuestionConsensus {
        question_id: question.id.clone(),
        rater_count: judgments.len(),
        tallies,
        scores,
        order,
    })
}
