use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oeq_cli::commands::{aggregate, augment, cluster, eval, gen, index, ingest, retrieve, score};
use oeq_cli::config::PipelineConfig;
use oeq_cli::{pipeline, CliError};

/// Assessment pipeline for open-ended questions: retrieval, augmentation,
/// scoring, rater aggregation, evaluation metrics, and clustering.
#[derive(Parser)]
#[command(name = "oeq", version, about)]
struct Cli {
    /// Config file supplying defaults for every subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config's global seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate inputs, normalize text, and produce embedding matrices.
    Ingest(ingest::IngestArgs),
    /// Build the inner-product index over an embedding matrix.
    Index(index::IndexArgs),
    /// Retrieve the top-k passages per query embedding.
    Retrieve(retrieve::RetrieveArgs),
    /// Combine questions with retrieved passages under a character budget.
    Augment(augment::AugmentArgs),
    /// Rank each question's options with a scorer backend.
    Score(score::ScoreArgs),
    /// Compute ranking and classification metrics against gold labels.
    Eval(eval::EvalArgs),
    /// Cluster question embeddings and select k by elbow and silhouette.
    Cluster(cluster::ClusterArgs),
    /// Aggregate teacher judgments into consensus orders.
    Aggregate(aggregate::AggregateArgs),
    /// Generate synthetic questions from corpus passages.
    Gen(gen::GenArgs),
    /// Run the configured pipeline end to end.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Artifact directory (overrides the config's out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip stages whose outputs already exist.
    #[arg(long)]
    resume: bool,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    match cli.command {
        Command::Ingest(args) => ingest::run(&args, &config),
        Command::Index(args) => index::run(&args, &config),
        Command::Retrieve(args) => retrieve::run(&args, &config),
        Command::Augment(args) => augment::run(&args, &config),
        Command::Score(args) => score::run(&args, &config),
        Command::Eval(args) => eval::run(&args, &config),
        Command::Cluster(args) => cluster::run(&args, &config),
        Command::Aggregate(args) => aggregate::run(&args, &config),
        Command::Gen(args) => gen::run(&args, &config),
        Command::Run(args) => {
            if let Some(out) = args.out {
                config.out_dir = out;
            }
            pipeline::run_pipeline(&config, args.resume)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("{error}");
            ExitCode::from(error.exit_code())
        }
    }
}
