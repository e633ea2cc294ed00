//! Pluggable response scorers and the synthetic question generator.
//!
//! Two scorer backends ship: a deterministic embedding-similarity baseline
//! that keeps the whole pipeline runnable offline, and a remote client that
//! lets any externally hosted model plug in over a small JSON-over-HTTP
//! protocol.

pub mod generate;
mod remote;

pub use generate::{
    generate_synthetic, FilterPolicy, GeneratedQuestion, GenerationClient, GenerationReport,
    GenerationTask, SkippedItem, StubGenerationClient,
};
pub use remote::{RemoteGenerationClient, RemoteScorer, ScoreRequest, ScoreResponse};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::augment::AugmentedQuery;
use crate::embed::HashEmbedder;
use crate::error::{Error, Result};
use crate::model::{QuestionItem, RankedOption, RankedPrediction};

/// Connection settings for a remote scorer or generator endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteConfig {
    pub endpoint: String,
    /// Per-attempt timeout.
    pub timeout: Duration,
    /// Extra attempts after the first; transport failures back off
    /// exponentially between attempts.
    pub retries: u32,
    /// Initial backoff delay, doubled per retry.
    pub backoff: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> RemoteConfig {
        RemoteConfig {
            endpoint: endpoint.into(),
            timeout: Duration::from_secs(10),
            retries: 2,
            backoff: Duration::from_millis(250),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.endpoint.is_empty() {
            return Err(Error::InvalidArg("remote endpoint is empty".into()));
        }
        if self.timeout.is_zero() {
            return Err(Error::InvalidArg("remote timeout must be positive".into()));
        }
        Ok(())
    }
}

/// Which scorer backend to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScorerSpec {
    BaselineCosine { embedder: HashEmbedder },
    Remote(RemoteConfig),
}

impl ScorerSpec {
    pub fn build(&self) -> Result<Box<dyn Scorer>> {
        match self {
            ScorerSpec::BaselineCosine { embedder } => {
                Ok(Box::new(BaselineCosineScorer::new(embedder.clone())))
            }
            ScorerSpec::Remote(config) => Ok(Box::new(RemoteScorer::new(config.clone())?)),
        }
    }
}

/// Scores one question's options against its augmented query, producing a
/// full ranking. Implementations must be deterministic per input.
pub trait Scorer: Send + Sync {
    fn score(&self, question: &QuestionItem, aug: &AugmentedQuery) -> Result<RankedPrediction>;
}

/// Offline baseline: rank options by inner product between each option-text
/// embedding and the mean of the question embedding and the admitted
/// context embeddings. Pure function of the embedded texts.
#[derive(Debug, Clone)]
pub struct BaselineCosineScorer {
    embedder: HashEmbedder,
}

impl BaselineCosineScorer {
    pub fn new(embedder: HashEmbedder) -> BaselineCosineScorer {
        BaselineCosineScorer { embedder }
    }
}

impl Scorer for BaselineCosineScorer {
    fn score(&self, question: &QuestionItem, aug: &AugmentedQuery) -> Result<RankedPrediction> {
        question.validate()?;
        let dim = self.embedder.dim();
        let mut query_side = vec![0.0f64; dim];
        let mut add = |text: &str| {
            for (acc, v) in query_side.iter_mut().zip(self.embedder.embed(text)) {
                *acc += v as f64;
            }
        };
        add(&aug.prompt);
        for context in &aug.contexts {
            add(&context.text);
        }
        let parts = (1 + aug.contexts.len()) as f64;
        for v in &mut query_side {
            *v /= parts;
        }

        let scores: Vec<RankedOption> = question
            .options
            .iter()
            .map(|opt| {
                let emb = self.embedder.embed(&opt.text);
                let score: f64 = emb
                    .iter()
                    .zip(&query_side)
                    .map(|(e, q)| *e as f64 * q)
                    .sum();
                RankedOption {
                    id: opt.id.clone(),
                    score,
                }
            })
            .collect();
        let prediction = RankedPrediction::from_scores(question.id.clone(), scores);
        prediction.validate_against(question)?;
        Ok(prediction)
    }
}

/// Score a batch with up to `concurrency` calls in flight. Output order
/// matches input order; the first error (in input order) wins.
pub fn score_batch(
    scorer: &dyn Scorer,
    items: &[(&QuestionItem, &AugmentedQuery)],
    concurrency: usize,
) -> Result<Vec<RankedPrediction>> {
    let n = items.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let workers = concurrency.max(1).min(n);
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<RankedPrediction>>>> =
        (0..n).map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let outcome = scorer.score(items[i].0, items[i].1);
                *slots[i].lock().expect("result slot poisoned") = Some(outcome);
            });
        }
    });

    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("result slot poisoned")
                .expect("worker filled every slot")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::Context;
    use crate::model::ResponseOption;

    fn question(options: &[(&str, &str)]) -> QuestionItem {
        QuestionItem {
            id: "q1".into(),
            prompt: "What causes rust on iron?".into(),
            options: options
                .iter()
                .map(|(id, text)| ResponseOption {
                    id: id.to_string(),
                    text: text.to_string(),
                })
                .collect(),
            category: None,
            gold: None,
        }
    }

    fn bare_aug(q: &QuestionItem) -> AugmentedQuery {
        AugmentedQuery {
            question_id: q.id.clone(),
            prompt: q.prompt.clone(),
            contexts: Vec::new(),
            rendered: q.prompt.clone(),
            budget: usize::MAX,
        }
    }

    #[test]
    fn baseline_prefers_matching_option() {
        let q = question(&[
            ("A", "oxidation of iron by oxygen and moisture causes rust"),
            ("B", "the violin concerto premiered in vienna"),
        ]);
        let scorer = BaselineCosineScorer::new(HashEmbedder::default());
        let pred = scorer.score(&q, &bare_aug(&q)).unwrap();
        assert_eq!(pred.top1(), Some("A"));
    }

    #[test]
    fn identical_options_tie_break_by_id() {
        let q = question(&[("B", "same text"), ("A", "same text")]);
        let scorer = BaselineCosineScorer::new(HashEmbedder::default());
        let pred = scorer.score(&q, &bare_aug(&q)).unwrap();
        assert_eq!(pred.ranked_ids(), vec!["A", "B"]);
    }

    #[test]
    fn contexts_steer_the_ranking() {
        let q = question(&[
            ("A", "the answer involves chlorophyll and sunlight"),
            ("B", "the answer involves tectonic plates and magma"),
        ]);
        let scorer = BaselineCosineScorer::new(HashEmbedder::default());
        let mut aug = bare_aug(&q);
        aug.contexts.push(Context {
            id: "p1".into(),
            text: "chlorophyll absorbs sunlight in plant leaves".into(),
        });
        let pred = scorer.score(&q, &aug).unwrap();
        assert_eq!(pred.top1(), Some("A"));
    }

    #[test]
    fn baseline_is_bit_deterministic() {
        let q = question(&[("A", "alpha beta"), ("B", "gamma delta"), ("C", "epsilon")]);
        let scorer = BaselineCosineScorer::new(HashEmbedder::default());
        let a = scorer.score(&q, &bare_aug(&q)).unwrap();
        let b = scorer.score(&q, &bare_aug(&q)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn batch_preserves_order() {
        let questions: Vec<QuestionItem> = (0..8)
            .map(|i| {
                let mut q = question(&[("A", "alpha"), ("B", "beta")]);
                q.id = format!("q{i}");
                q
            })
            .collect();
        let augs: Vec<AugmentedQuery> = questions.iter().map(bare_aug).collect();
        let items: Vec<(&QuestionItem, &AugmentedQuery)> =
            questions.iter().zip(augs.iter()).collect();
        let scorer = BaselineCosineScorer::new(HashEmbedder::default());
        let preds = score_batch(&scorer, &items, 4).unwrap();
        for (pred, q) in preds.iter().zip(&questions) {
            assert_eq!(pred.question_id, q.id);
        }
    }
}
