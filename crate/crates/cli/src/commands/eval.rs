//! Eval stage: ranking and classification metrics over predictions and
//! gold labels, overall and per category.
//!
//! The gold file may be a questions file (gold labels embedded) or the
//! output of `aggregate` (consensus orders); the two record shapes are
//! detected per line.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use oeq_core::metrics::{
    average_precision, average_precision_at_k, ndcg, report_by_category, top1_metrics,
    top3_metrics, MapMode, MetricReport, RelevanceGrades, Top3Instance,
};
use oeq_core::model::{load_predictions, GoldLabel, QuestionItem, RankedPrediction};
use oeq_core::raters::QuestionConsensus;

use crate::commands::require_file;
use crate::config::PipelineConfig;
use crate::{write_atomic, CliError};

#[derive(Debug, Args, Clone, Default)]
pub struct EvalArgs {
    /// Predictions to evaluate (jsonl).
    #[arg(long)]
    pub predictions: PathBuf,
    /// Gold labels: a questions file or an `aggregate` output file.
    #[arg(long)]
    pub gold: PathBuf,
    /// Questions file supplying categories (and gold, if --gold lacks it).
    #[arg(long)]
    pub questions: Option<PathBuf>,
    /// Metrics to compute (comma separated): map@3, ndcg, map, top1, top3.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// Also break every metric down by question category.
    #[arg(long)]
    pub by_category: bool,
    /// MAP divisor mode: "standard" or "paper-literal" (reports both).
    #[arg(long)]
    pub map_mode: Option<String>,
    /// NDCG cutoff; 0 uses each question's option count.
    #[arg(long)]
    pub ndcg_k: Option<usize>,
    /// Report output file (json).
    #[arg(long)]
    pub out: PathBuf,
}

struct EvalItem {
    prediction: RankedPrediction,
    gold: GoldLabel,
    option_count: usize,
}

#[derive(Serialize)]
struct ReportFile {
    questions: usize,
    metrics: Vec<String>,
    map_mode: String,
    ndcg_k: usize,
    by_category: bool,
    reports: BTreeMap<String, MetricReport>,
}

/// Parse one gold-file line as either a question or a consensus record.
fn parse_gold_line(line: &str) -> anyhow::Result<(String, Option<GoldLabel>, Option<String>)> {
    let value: serde_json::Value = serde_json::from_str(line)?;
    if value.get("options").is_some() {
        let question: QuestionItem = serde_json::from_value(value)?;
        question.validate()?;
        Ok((question.id, question.gold, question.category))
    } else if value.get("order").is_some() {
        let consensus: QuestionConsensus = serde_json::from_value(value)?;
        Ok((
            consensus.question_id,
            Some(GoldLabel::HumanOrder(consensus.order)),
            None,
        ))
    } else {
        anyhow::bail!("gold record is neither a question nor a consensus order")
    }
}

fn load_gold(
    path: &Path,
) -> anyhow::Result<(HashMap<String, GoldLabel>, HashMap<String, String>)> {
    let text = std::fs::read_to_string(path)?;
    let mut golds = HashMap::new();
    let mut categories = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, gold, category) = parse_gold_line(line)
            .map_err(|e| anyhow::anyhow!("{}:{}: {e}", path.display(), idx + 1))?;
        if let Some(gold) = gold {
            golds.insert(id.clone(), gold);
        }
        if let Some(category) = category {
            categories.insert(id, category);
        }
    }
    Ok((golds, categories))
}

pub fn run(args: &EvalArgs, config: &PipelineConfig) -> Result<(), CliError> {
    require_file("predictions", &args.predictions)?;
    require_file("gold", &args.gold)?;
    if let Some(q) = &args.questions {
        require_file("questions", q)?;
    }
    let metric_names = if args.metrics.is_empty() {
        config.eval.metrics.clone()
    } else {
        args.metrics.clone()
    };
    let map_mode_name = args
        .map_mode
        .clone()
        .unwrap_or_else(|| config.eval.map_mode.clone());
    let map_mode = match map_mode_name.as_str() {
        "standard" => MapMode::Standard,
        "paper-literal" => MapMode::PaperLiteral,
        other => {
            return Err(CliError::validation(format!(
                "map mode must be \"standard\" or \"paper-literal\", got {other:?}"
            )))
        }
    };
    let ndcg_k = args.ndcg_k.unwrap_or(config.eval.ndcg_k);
    let by_category = args.by_category || config.eval.by_category;
    for name in &metric_names {
        if !["map@3", "ndcg", "map", "top1", "top3"].contains(&name.as_str()) {
            return Err(CliError::validation(format!("unknown metric {name:?}")));
        }
    }

    let evaluate = || -> anyhow::Result<()> {
        let predictions = load_predictions(&args.predictions)?;
        let (mut golds, mut categories) = load_gold(&args.gold)?;
        if let Some(questions_path) = &args.questions {
            let (extra_golds, extra_categories) = load_gold(questions_path)?;
            for (id, gold) in extra_golds {
                golds.entry(id).or_insert(gold);
            }
            categories.extend(extra_categories);
        }

        let mut items: Vec<(Option<String>, EvalItem)> = Vec::with_capacity(predictions.len());
        for prediction in predictions {
            let gold = golds
                .get(&prediction.question_id)
                .cloned()
                .ok_or_else(|| oeq_core::Error::MissingGold {
                    question_id: prediction.question_id.clone(),
                })?;
            let category = categories.get(&prediction.question_id).cloned();
            items.push((
                category,
                EvalItem {
                    option_count: prediction.ranking.len(),
                    prediction,
                    gold,
                },
            ));
        }
        if items.is_empty() {
            anyhow::bail!("no predictions to evaluate");
        }

        let mut reports: BTreeMap<String, MetricReport> = BTreeMap::new();
        let mut add = |name: &str, eval: &dyn Fn(&[&EvalItem]) -> oeq_core::Result<f64>|
         -> anyhow::Result<()> {
            let report = if by_category {
                report_by_category(name, &items, eval)?
            } else {
                let pooled: Vec<&EvalItem> = items.iter().map(|(_, i)| i).collect();
                MetricReport {
                    metric: name.to_string(),
                    overall: eval(&pooled)?,
                    per_category: BTreeMap::new(),
                    category_counts: BTreeMap::new(),
                }
            };
            reports.insert(name.to_string(), report);
            Ok(())
        };

        for name in &metric_names {
            match name.as_str() {
                "map@3" => add("map@3", &|members| {
                    let mut total = 0.0;
                    for item in members {
                        let best = gold_best(&item.gold)?;
                        let ranking = item.prediction.ranked_ids();
                        let relevant: HashSet<&str> = [best].into();
                        total += average_precision_at_k(&ranking, &relevant, 3)?;
                    }
                    Ok(total / members.len() as f64)
                })?,
                "ndcg" => add("ndcg", &|members| {
                    let mut total = 0.0;
                    for item in members {
                        let grades = grades_of(item);
                        let k = if ndcg_k == 0 { item.option_count } else { ndcg_k };
                        total += ndcg(&item.prediction.ranked_ids(), &grades, k)?;
                    }
                    Ok(total / members.len() as f64)
                })?,
                "map" => {
                    let map_eval = move |mode: MapMode| {
                        move |members: &[&EvalItem]| -> oeq_core::Result<f64> {
                            let mut total = 0.0;
                            for item in members {
                                let relevant = relevant_set(&item.gold)?;
                                let refs: HashSet<&str> =
                                    relevant.iter().map(String::as_str).collect();
                                total += average_precision(
                                    &item.prediction.ranked_ids(),
                                    &refs,
                                    mode,
                                )?;
                            }
                            Ok(total / members.len() as f64)
                        }
                    };
                    add("map", &map_eval(map_mode))?;
                    if map_mode == MapMode::PaperLiteral {
                        // Literal mode reports both divisors side by side.
                        add("map_standard", &map_eval(MapMode::Standard))?;
                    }
                }
                "top1" => {
                    for field in ["accuracy", "precision", "recall", "f1"] {
                        add(&format!("top1_{field}"), &move |members| {
                            let pairs: Vec<(&str, &str)> = members
                                .iter()
                                .map(|item| {
                                    Ok((
                                        item.prediction.top1().unwrap_or(""),
                                        gold_best(&item.gold)?,
                                    ))
                                })
                                .collect::<oeq_core::Result<_>>()?;
                            let m = top1_metrics(&pairs)?;
                            Ok(match field {
                                "accuracy" => m.accuracy,
                                "precision" => m.precision,
                                "recall" => m.recall,
                                _ => m.f1,
                            })
                        })?;
                    }
                }
                "top3" => {
                    for field in [
                        "precision",
                        "recall",
                        "f1",
                        "accuracy_options",
                        "accuracy_exact_set",
                    ] {
                        add(&format!("top3_{field}"), &move |members| {
                            let instances: Vec<Top3Instance> = members
                                .iter()
                                .map(|item| top3_instance(item))
                                .collect::<oeq_core::Result<_>>()?;
                            let m = top3_metrics(&instances)?;
                            Ok(match field {
                                "precision" => m.precision,
                                "recall" => m.recall,
                                "f1" => m.f1,
                                "accuracy_options" => m.option_accuracy,
                                _ => m.exact_set_accuracy,
                            })
                        })?;
                    }
                }
                _ => unreachable!("validated above"),
            }
        }

        let report = ReportFile {
            questions: items.len(),
            metrics: metric_names.clone(),
            map_mode: map_mode_name.clone(),
            ndcg_k,
            by_category,
            reports,
        };
        let mut bytes = serde_json::to_vec_pretty(&report)?;
        bytes.push(b'\n');
        write_atomic(&args.out, &bytes)?;
        log::info!("wrote metric report to {}", args.out.display());
        Ok(())
    };
    evaluate().map_err(|e| CliError::stage("eval", e))
}

fn gold_best(gold: &GoldLabel) -> oeq_core::Result<&str> {
    gold.best().ok_or_else(|| {
        oeq_core::Error::Invariant("gold order is empty".into())
    })
}

/// Relevance grades for NDCG: linear from a consensus order, binary from a
/// single-correct label.
fn grades_of(item: &EvalItem) -> RelevanceGrades {
    match &item.gold {
        GoldLabel::HumanOrder(order) => {
            RelevanceGrades::from_human_order(item.prediction.question_id.clone(), order)
        }
        GoldLabel::SingleCorrect(correct) => RelevanceGrades {
            question_id: item.prediction.question_id.clone(),
            grades: item
                .prediction
                .ranking
                .iter()
                .map(|r| (r.id.clone(), u32::from(&r.id == correct)))
                .collect(),
        },
    }
}

/// Relevant set for full MAP: the consensus top-3, or the single correct id.
fn relevant_set(gold: &GoldLabel) -> oeq_core::Result<Vec<String>> {
    match gold {
        GoldLabel::HumanOrder(order) => Ok(order.iter().take(3).cloned().collect()),
        GoldLabel::SingleCorrect(id) => Ok(vec![id.clone()]),
    }
}

fn top3_instance(item: &EvalItem) -> oeq_core::Result<Top3Instance> {
    let GoldLabel::HumanOrder(order) = &item.gold else {
        return Err(oeq_core::Error::InvalidArg(format!(
            "top3 metrics need consensus-order gold; question `{}` has a single-correct label",
            item.prediction.question_id
        )));
    };
    Ok(Top3Instance {
        predicted_top3: item
            .prediction
            .top_k(3)
            .into_iter()
            .map(str::to_string)
            .collect(),
        gold_top3: order.iter().take(3).cloned().collect(),
        option_count: item.option_count,
    })
}
