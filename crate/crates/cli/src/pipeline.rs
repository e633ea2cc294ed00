//! The composed pipeline: ingest -> index -> retrieve -> augment -> score
//! -> (aggregate) -> eval -> (cluster), each stage writing its artifact to
//! the output directory.
//!
//! Stages are plain functions over on-disk artifacts, so the composed run
//! equals invoking the subcommands one by one, and a failed run can resume
//! from whatever completed. A stage failure leaves prior artifacts
//! untouched and records a machine-readable `error.json`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::commands::{aggregate, augment, cluster, eval, index, ingest, retrieve, score};
use crate::config::PipelineConfig;
use crate::CliError;

#[derive(Serialize)]
struct ErrorReport<'a> {
    stage: &'a str,
    error: String,
}

/// Artifact paths of a pipeline run, all inside `out_dir`.
pub struct Artifacts {
    pub corpus_norm: PathBuf,
    pub corpus_embeddings: PathBuf,
    pub query_embeddings: PathBuf,
    pub index: PathBuf,
    pub hits: PathBuf,
    pub augmented: PathBuf,
    pub predictions: PathBuf,
    pub gold: PathBuf,
    pub report: PathBuf,
    pub clusters: PathBuf,
}

impl Artifacts {
    pub fn in_dir(out_dir: &Path) -> Artifacts {
        let ingest_out = ingest::outputs(out_dir);
        Artifacts {
            corpus_norm: ingest_out.corpus_norm,
            corpus_embeddings: ingest_out.corpus_embeddings,
            query_embeddings: ingest_out.query_embeddings,
            index: out_dir.join("index.bin"),
            hits: out_dir.join("hits.jsonl"),
            augmented: out_dir.join("aug.jsonl"),
            predictions: out_dir.join("preds.jsonl"),
            gold: out_dir.join("gold.jsonl"),
            report: out_dir.join("report.json"),
            clusters: out_dir.join("clusters.json"),
        }
    }
}

fn record_failure(out_dir: &Path, error: &CliError) {
    if let CliError::Stage { stage, source } = error {
        let report = ErrorReport {
            stage,
            error: format!("{source:#}"),
        };
        if let Ok(bytes) = serde_json::to_vec_pretty(&report) {
            let _ = std::fs::write(out_dir.join("error.json"), bytes);
        }
    }
}

/// Run the configured pipeline end to end. With `resume`, stages whose
/// outputs already exist are skipped.
pub fn run_pipeline(config: &PipelineConfig, resume: bool) -> Result<(), CliError> {
    config.validate_for_run()?;
    let out_dir = config.out_dir.clone();
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::validation(format!("cannot create {}: {e}", out_dir.display())))?;
    // A fresh run must not inherit a stale failure marker.
    let _ = std::fs::remove_file(out_dir.join("error.json"));

    let result = run_stages(config, &out_dir, resume);
    if let Err(error) = &result {
        record_failure(&out_dir, error);
    }
    result
}

fn run_stages(config: &PipelineConfig, out_dir: &Path, resume: bool) -> Result<(), CliError> {
    let artifacts = Artifacts::in_dir(out_dir);
    let questions = config
        .paths
        .questions
        .clone()
        .expect("validated: questions path set");
    let skip = |outputs: &[&Path]| resume && outputs.iter().all(|p| p.exists());

    if skip(&[
        &artifacts.corpus_norm,
        &artifacts.corpus_embeddings,
        &artifacts.query_embeddings,
    ]) {
        log::info!("ingest: outputs exist, skipped");
    } else {
        ingest::run(
            &ingest::IngestArgs {
                out_dir: Some(out_dir.to_path_buf()),
                ..Default::default()
            },
            config,
        )?;
    }

    if skip(&[&artifacts.index]) {
        log::info!("index: output exists, skipped");
    } else {
        index::run(
            &index::IndexArgs {
                embeddings: artifacts.corpus_embeddings.clone(),
                out: artifacts.index.clone(),
                partitions: None,
                seed: None,
            },
            config,
        )?;
    }

    if skip(&[&artifacts.hits]) {
        log::info!("retrieve: output exists, skipped");
    } else {
        retrieve::run(
            &retrieve::RetrieveArgs {
                index: artifacts.index.clone(),
                query_embeddings: artifacts.query_embeddings.clone(),
                k: None,
                nprobe: None,
                out: artifacts.hits.clone(),
            },
            config,
        )?;
    }

    if skip(&[&artifacts.augmented]) {
        log::info!("augment: output exists, skipped");
    } else {
        augment::run(
            &augment::AugmentArgs {
                questions: questions.clone(),
                hits: artifacts.hits.clone(),
                corpus: artifacts.corpus_norm.clone(),
                budget: None,
                template: None,
                out: artifacts.augmented.clone(),
            },
            config,
        )?;
    }

    if skip(&[&artifacts.predictions]) {
        log::info!("score: output exists, skipped");
    } else {
        score::run(
            &score::ScoreArgs {
                aug: artifacts.augmented.clone(),
                questions: questions.clone(),
                out: artifacts.predictions.clone(),
                ..Default::default()
            },
            config,
        )?;
    }

    let gold_path = match &config.paths.judgments {
        Some(judgments) => {
            if skip(&[&artifacts.gold]) {
                log::info!("aggregate: output exists, skipped");
            } else {
                aggregate::run(
                    &aggregate::AggregateArgs {
                        judgments: judgments.clone(),
                        questions: questions.clone(),
                        out: artifacts.gold.clone(),
                    },
                    config,
                )?;
            }
            artifacts.gold.clone()
        }
        None => questions.clone(),
    };

    if skip(&[&artifacts.report]) {
        log::info!("eval: output exists, skipped");
    } else {
        eval::run(
            &eval::EvalArgs {
                predictions: artifacts.predictions.clone(),
                gold: gold_path,
                questions: Some(questions.clone()),
                metrics: Vec::new(),
                by_category: config.eval.by_category,
                map_mode: None,
                ndcg_k: None,
                out: artifacts.report.clone(),
            },
            config,
        )?;
    }

    if config.cluster.enabled {
        if skip(&[&artifacts.clusters]) {
            log::info!("cluster: output exists, skipped");
        } else {
            cluster::run(
                &cluster::ClusterArgs {
                    embeddings: artifacts.query_embeddings.clone(),
                    reduce_dim: None,
                    k_range: None,
                    seeds: None,
                    seed: None,
                    questions: Some(questions),
                    out: artifacts.clusters.clone(),
                },
                config,
            )?;
        }
    }
    Ok(())
}
