//! Ranking and classification metrics: AP@k / MAP@k, NDCG, full MAP in two
//! divisor modes, Top1 macro metrics, Top3 micro metrics, and per-category
//! reporting.
//!
//! Full MAP ships with two modes because the conventional average-precision
//! divisor is the relevant-item count `m`, while some write-ups divide by
//! the ranked-list length `n`; the latter caps MAP below 1 whenever m < n.
//! `Standard` divides by `m` and is the default; `PaperLiteral` divides by
//! `n` and is reported alongside for comparison.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RankedPrediction;

/// Category bucket used when a question carries no category label.
pub const UNCATEGORIZED: &str = "uncategorized";

/// Graded ground truth for one question: option id -> relevance grade.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevanceGrades {
    pub question_id: String,
    pub grades: BTreeMap<String, u32>,
}

impl RelevanceGrades {
    /// Linear grades from a consensus order: with n options the best gets
    /// n-1, the worst 0.
    pub fn from_human_order(question_id: impl Into<String>, order: &[String]) -> RelevanceGrades {
        let n = order.len();
        RelevanceGrades {
            question_id: question_id.into(),
            grades: order
                .iter()
                .enumerate()
                .map(|(pos, id)| (id.clone(), (n - 1 - pos) as u32))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.grades.values().any(|&g| g > 0) {
            return Err(Error::Undefined(format!(
                "grades for `{}` have no positive entry",
                self.question_id
            )));
        }
        Ok(())
    }
}

/// Binary decision counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.true_pos + self.true_neg, self.total())
    }

    pub fn precision(&self) -> f64 {
        ratio(self.true_pos, self.true_pos + self.false_pos)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.true_pos, self.true_pos + self.false_neg)
    }

    /// 2TP / (2TP + FP + FN). Same value as the harmonic mean of precision
    /// and recall, but exact when FP = FN (the quotient then equals the
    /// precision quotient bit for bit).
    pub fn f1(&self) -> f64 {
        ratio(2 * self.true_pos, 2 * self.true_pos + self.false_pos + self.false_neg)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1_of(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// One metric value, overall and per category.
///
/// The overall value is always recomputed over the pooled items, never
/// averaged from the category values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: String,
    pub overall: f64,
    pub per_category: BTreeMap<String, f64>,
    pub category_counts: BTreeMap<String, usize>,
}

/// Average precision truncated at rank `k`.
///
/// AP@k = sum_{j<=min(n,k)} P(j) * Rel(j) / min(|relevant|, k), where each
/// relevant id contributes at its first occurrence only.
pub fn average_precision_at_k(
    ranking: &[&str],
    relevant: &HashSet<&str>,
    k: usize,
) -> Result<f64> {
    if relevant.is_empty() {
        return Err(Error::Undefined("empty relevant set".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArg("k must be positive".into()));
    }
    if ranking.is_empty() {
        return Err(Error::InvalidArg("empty ranking".into()));
    }
    let mut counted: HashSet<&str> = HashSet::new();
    let mut sum = 0.0;
    for (idx, id) in ranking.iter().take(k).enumerate() {
        if relevant.contains(id) && counted.insert(id) {
            let position = idx + 1;
            sum += counted.len() as f64 / position as f64;
        }
    }
    Ok(sum / relevant.len().min(k) as f64)
}

/// MAP@k over single-correct questions: the unweighted mean of per-question
/// AP@k with the gold option as the only relevant item.
pub fn map_at_k(
    predictions: &[RankedPrediction],
    golds: &HashMap<String, String>,
    k: usize,
) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::Undefined("no predictions to average".into()));
    }
    let mut sum = 0.0;
    for pred in predictions {
        let gold = golds
            .get(&pred.question_id)
            .ok_or_else(|| Error::MissingGold {
                question_id: pred.question_id.clone(),
            })?;
        let ranking = pred.ranked_ids();
        let relevant: HashSet<&str> = [gold.as_str()].into();
        sum += average_precision_at_k(&ranking, &relevant, k)?;
    }
    Ok(sum / predictions.len() as f64)
}

/// Normalized discounted cumulative gain at cutoff `k`.
///
/// DCG = sum_{i<=k} (2^rel_i - 1) / log2(i + 1) over the given ranking;
/// IDCG is the same sum over the grades sorted descending.
pub fn ndcg(ranking: &[&str], grades: &RelevanceGrades, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArg("k must be positive".into()));
    }
    grades.validate()?;
    let mut dcg = 0.0;
    for (idx, id) in ranking.iter().take(k).enumerate() {
        let grade = *grades.grades.get(*id).ok_or_else(|| Error::UnknownId {
            kind: "graded option",
            id: id.to_string(),
        })?;
        dcg += gain(grade) / discount(idx);
    }
    let mut ideal: Vec<u32> = grades.grades.values().copied().collect();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal
        .iter()
        .take(k)
        .enumerate()
        .map(|(idx, &grade)| gain(grade) / discount(idx))
        .sum();
    // A positive grade exists, so the ideal list opens with one and idcg > 0.
    Ok(dcg / idcg)
}

fn gain(grade: u32) -> f64 {
    2f64.powi(grade as i32) - 1.0
}

fn discount(zero_based_rank: usize) -> f64 {
    ((zero_based_rank + 2) as f64).log2()
}

/// Divisor convention for full (uncut) average precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapMode {
    /// Divide by the relevant-item count m (conventional definition).
    Standard,
    /// Divide by the ranked-list length n.
    PaperLiteral,
}

/// Full average precision over a ranking.
pub fn average_precision(ranking: &[&str], relevant: &HashSet<&str>, mode: MapMode) -> Result<f64> {
    if relevant.is_empty() {
        return Err(Error::Undefined("empty relevant set".into()));
    }
    if ranking.is_empty() {
        return Err(Error::InvalidArg("empty ranking".into()));
    }
    let mut counted: HashSet<&str> = HashSet::new();
    let mut sum = 0.0;
    for (idx, id) in ranking.iter().enumerate() {
        if relevant.contains(id) && counted.insert(id) {
            sum += counted.len() as f64 / (idx + 1) as f64;
        }
    }
    let divisor = match mode {
        MapMode::Standard => relevant.len(),
        MapMode::PaperLiteral => ranking.len(),
    };
    Ok(sum / divisor as f64)
}

/// Mean average precision over (ranking, relevant-set) instances.
pub fn mean_average_precision(
    items: &[(Vec<&str>, HashSet<&str>)],
    mode: MapMode,
) -> Result<f64> {
    if items.is_empty() {
        return Err(Error::Undefined("no rankings to average".into()));
    }
    let mut sum = 0.0;
    for (ranking, relevant) in items {
        sum += average_precision(ranking, relevant, mode)?;
    }
    Ok(sum / items.len() as f64)
}

/// Top1 task results: accuracy plus macro-averaged precision/recall/F1 over
/// the option-label classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Top1Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Evaluate the first-place prediction task over (predicted, gold) label
/// pairs. Classes are macro-averaged over every label present in either
/// the gold labels or the predictions.
pub fn top1_metrics(pairs: &[(&str, &str)]) -> Result<Top1Metrics> {
    if pairs.is_empty() {
        return Err(Error::Undefined("no questions to evaluate".into()));
    }
    let matches = pairs.iter().filter(|(pred, gold)| pred == gold).count();
    let classes: BTreeSet<&str> = pairs.iter().flat_map(|(p, g)| [*p, *g]).collect();
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut f1_sum = 0.0;
    for class in &classes {
        let tp = pairs.iter().filter(|(p, g)| p == class && g == class).count();
        let fp = pairs.iter().filter(|(p, g)| p == class && g != class).count();
        let fn_ = pairs.iter().filter(|(p, g)| p != class && g == class).count();
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        precision_sum += precision;
        recall_sum += recall;
        f1_sum += f1_of(precision, recall);
    }
    let n_classes = classes.len() as f64;
    Ok(Top1Metrics {
        accuracy: matches as f64 / pairs.len() as f64,
        precision: precision_sum / n_classes,
        recall: recall_sum / n_classes,
        f1: f1_sum / n_classes,
    })
}

/// One question's Top3 decisions: the predicted and gold positive sets plus
/// the number of options (every option is one binary decision).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Top3Instance {
    pub predicted_top3: Vec<String>,
    pub gold_top3: Vec<String>,
    pub option_count: usize,
}

/// Top3 task results, micro-averaged over every option-level decision.
///
/// Accuracy is reported two ways: `option_accuracy` counts every binary
/// decision, `exact_set_accuracy` counts questions whose predicted set
/// matches the gold set exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Top3Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub option_accuracy: f64,
    pub exact_set_accuracy: f64,
    pub confusion: ConfusionCounts,
}

/// Evaluate the good-answer identification task.
pub fn top3_metrics(items: &[Top3Instance]) -> Result<Top3Metrics> {
    if items.is_empty() {
        return Err(Error::Undefined("no questions to evaluate".into()));
    }
    let mut confusion = ConfusionCounts::default();
    let mut exact = 0usize;
    for item in items {
        if item.option_count < 3 {
            return Err(Error::InvalidArg(format!(
                "top3 task requires at least 3 options, got {}",
                item.option_count
            )));
        }
        let predicted: HashSet<&str> = item.predicted_top3.iter().map(String::as_str).collect();
        let gold: HashSet<&str> = item.gold_top3.iter().map(String::as_str).collect();
        if predicted.len() != 3 || gold.len() != 3 {
            return Err(Error::InvalidArg(
                "top3 task requires exactly 3 distinct predicted and gold positives".into(),
            ));
        }
        let tp = predicted.intersection(&gold).count();
        let true_neg = (item.option_count + tp).checked_sub(6).ok_or_else(|| {
            Error::InvalidArg(
                "predicted and gold positives overflow the option universe".into(),
            )
        })?;
        confusion.true_pos += tp;
        confusion.false_pos += 3 - tp;
        confusion.false_neg += 3 - tp;
        confusion.true_neg += true_neg;
        if tp == 3 {
            exact += 1;
        }
    }
    Ok(Top3Metrics {
        precision: confusion.precision(),
        recall: confusion.recall(),
        f1: confusion.f1(),
        option_accuracy: confusion.accuracy(),
        exact_set_accuracy: exact as f64 / items.len() as f64,
        confusion,
    })
}

/// Compute a metric overall and per category.
///
/// Items without a category are grouped under [`UNCATEGORIZED`] with a
/// logged warning. The overall value is the metric over the pooled items.
pub fn report_by_category<T, F>(
    metric: &str,
    items: &[(Option<String>, T)],
    eval: F,
) -> Result<MetricReport>
where
    F: Fn(&[&T]) -> Result<f64>,
{
    let pooled: Vec<&T> = items.iter().map(|(_, item)| item).collect();
    let overall = eval(&pooled)?;

    let mut groups: BTreeMap<String, Vec<&T>> = BTreeMap::new();
    for (cat, item) in items {
        let key = match cat {
            Some(c) => c.clone(),
            None => {
                log::warn!("item without category grouped under `{UNCATEGORIZED}`");
                UNCATEGORIZED.to_string()
            }
        };
        groups.entry(key).or_default().push(item);
    }
    let mut per_category = BTreeMap::new();
    let mut category_counts = BTreeMap::new();
    for (cat, members) in &groups {
        per_category.insert(cat.clone(), eval(members)?);
        category_counts.insert(cat.clone(), members.len());
    }
    Ok(MetricReport {
        metric: metric.to_string(),
        overall,
        per_category,
        category_counts,
    })
}
