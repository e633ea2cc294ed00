//! Ingest stage: validate the corpus and questions, normalize whitespace,
//! and produce the embedding matrices the later stages consume.
//!
//! Embeddings are an ingestion input: externally produced matrices are
//! adopted as-is (after validation); otherwise the deterministic hashing
//! embedder runs so the pipeline works offline.

use std::path::{Path, PathBuf};

use clap::Args;

use oeq_core::embed::HashEmbedder;
use oeq_core::model::{
    load_corpus, load_embeddings, load_questions, normalize_whitespace, save_embeddings,
    CorpusPassage, EmbeddingMatrix,
};

use crate::commands::require_file;
use crate::config::PipelineConfig;
use crate::{save_atomic, write_atomic, CliError};

#[derive(Debug, Args, Clone, Default)]
pub struct IngestArgs {
    /// Corpus passages (jsonl).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Questions (jsonl).
    #[arg(long)]
    pub questions: Option<PathBuf>,
    /// Output directory for stage artifacts.
    #[arg(long = "out")]
    pub out_dir: Option<PathBuf>,
    /// Embedding dimension of the built-in embedder.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Character n-gram size of the built-in embedder.
    #[arg(long)]
    pub ngram: Option<usize>,
    /// L2-normalize embedding rows (inner product becomes cosine).
    #[arg(long)]
    pub normalize: Option<bool>,
    /// Adopt externally produced corpus embeddings instead of embedding.
    #[arg(long)]
    pub corpus_embeddings: Option<PathBuf>,
    /// Adopt externally produced question embeddings instead of embedding.
    #[arg(long)]
    pub query_embeddings: Option<PathBuf>,
}

pub struct IngestOutputs {
    pub corpus_norm: PathBuf,
    pub corpus_embeddings: PathBuf,
    pub query_embeddings: PathBuf,
}

pub fn outputs(out_dir: &Path) -> IngestOutputs {
    IngestOutputs {
        corpus_norm: out_dir.join("corpus.norm.jsonl"),
        corpus_embeddings: out_dir.join("corpus_emb.bin"),
        query_embeddings: out_dir.join("questions_emb.bin"),
    }
}

pub fn run(args: &IngestArgs, config: &PipelineConfig) -> Result<(), CliError> {
    let corpus_path = args
        .corpus
        .clone()
        .or_else(|| config.paths.corpus.clone())
        .ok_or_else(|| CliError::validation("--corpus (or paths.corpus) is required"))?;
    let questions_path = args
        .questions
        .clone()
        .or_else(|| config.paths.questions.clone())
        .ok_or_else(|| CliError::validation("--questions (or paths.questions) is required"))?;
    let out_dir = args.out_dir.clone().unwrap_or_else(|| config.out_dir.clone());
    let dim = args.dim.unwrap_or(config.embedding.dim);
    let ngram = args.ngram.unwrap_or(config.embedding.ngram);
    let normalize = args.normalize.unwrap_or(config.embedding.normalize);
    let external_corpus = args
        .corpus_embeddings
        .clone()
        .or_else(|| config.paths.corpus_embeddings.clone());
    let external_query = args
        .query_embeddings
        .clone()
        .or_else(|| config.paths.query_embeddings.clone());

    require_file("corpus", &corpus_path)?;
    require_file("questions", &questions_path)?;
    if dim == 0 || ngram == 0 {
        return Err(CliError::validation("dim and ngram must be positive"));
    }

    execute(
        &corpus_path,
        &questions_path,
        &out_dir,
        dim,
        ngram,
        normalize,
        external_corpus.as_deref(),
        external_query.as_deref(),
    )
    .map_err(|e| CliError::stage("ingest", e))
}

#[allow(clippy::too_many_arguments)]
fn execute(
    corpus_path: &Path,
    questions_path: &Path,
    out_dir: &Path,
    dim: usize,
    ngram: usize,
    normalize: bool,
    external_corpus: Option<&Path>,
    external_query: Option<&Path>,
) -> anyhow::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let out = outputs(out_dir);

    let corpus = load_corpus(corpus_path)?;
    let questions = load_questions(questions_path)?;

    // The only text cleaning anywhere: whitespace normalization.
    let normalized: Vec<CorpusPassage> = corpus
        .iter()
        .map(|p| CorpusPassage {
            id: p.id.clone(),
            title: normalize_whitespace(&p.title),
            body: normalize_whitespace(&p.body),
            source: p.source,
        })
        .collect();
    let jsonl = crate::records::to_jsonl(&normalized)?;
    write_atomic(&out.corpus_norm, &jsonl)?;

    let embedder = HashEmbedder::new(dim, ngram);
    let adopt = |path: &Path| -> anyhow::Result<EmbeddingMatrix> {
        let mut matrix = load_embeddings(path)?;
        if normalize {
            matrix.normalize_rows();
        }
        Ok(matrix)
    };

    let corpus_matrix = match external_corpus {
        Some(path) => adopt(path)?,
        None => {
            // Embedder output is already unit-norm; the normalize flag only
            // matters for adopted external matrices.
            let texts: Vec<(String, String)> = normalized
                .iter()
                .map(|p| (p.id.clone(), format!("{} {}", p.title, p.body)))
                .collect();
            embedder.embed_all(texts.iter().map(|(id, text)| (id.as_str(), text.as_str())))
        }
    };
    save_atomic(&out.corpus_embeddings, |p| {
        save_embeddings(&corpus_matrix, p)
    })?;

    let query_matrix = match external_query {
        Some(path) => adopt(path)?,
        None => {
            let texts: Vec<(String, String)> = questions
                .iter()
                .map(|q| (q.id.clone(), normalize_whitespace(&q.prompt)))
                .collect();
            embedder.embed_all(texts.iter().map(|(id, text)| (id.as_str(), text.as_str())))
        }
    };
    save_atomic(&out.query_embeddings, |p| save_embeddings(&query_matrix, p))?;

    log::info!(
        "ingested {} passages and {} questions into {}",
        normalized.len(),
        questions.len(),
        out_dir.display()
    );
    Ok(())
}
