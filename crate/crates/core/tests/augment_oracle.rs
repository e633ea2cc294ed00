//! Greedy-admission oracle and purity/monotonicity properties for query
//! augmentation.

mod common;

use std::collections::HashMap;

use oeq_core::augment::{augment_query, corpus_lookup, QueryTemplate};
use oeq_core::index::RetrievalHit;
use oeq_core::model::{CorpusPassage, PassageSource, QuestionItem};
use rand::prelude::*;

fn passage(id: &str, body: String) -> CorpusPassage {
    CorpusPassage {
        id: id.to_string(),
        title: format!("title {id}"),
        body,
        source: PassageSource::Other,
    }
}

fn hits_for(ids: &[String]) -> Vec<RetrievalHit> {
    ids.iter()
        .enumerate()
        .map(|(rank, id)| RetrievalHit {
            passage_id: id.clone(),
            score: 100.0 - rank as f32,
        })
        .collect()
}

/// Reference simulation: walk hits best-first over (length, separator)
/// arithmetic only, skipping anything that overflows.
fn greedy_with_skips_oracle(
    base_chars: usize,
    sep_chars: usize,
    bodies: &[(String, usize)],
    budget: usize,
) -> Vec<String> {
    let mut admitted = Vec::new();
    let mut used = base_chars;
    for (id, len) in bodies {
        let cost = if admitted.is_empty() { *len } else { sep_chars + *len };
        if used + cost <= budget {
            used += cost;
            admitted.push(id.clone());
        }
    }
    admitted
}

struct Scenario {
    question: QuestionItem,
    corpus: Vec<CorpusPassage>,
    hit_ids: Vec<String>,
}

fn random_scenario(rng: &mut rand_chacha::ChaCha8Rng, n_hits: usize) -> Scenario {
    let question = common::random_question(rng, "q0", 5);
    let corpus: Vec<CorpusPassage> = (0..n_hits)
        .map(|i| {
            let words = rng.random_range(1..40);
            passage(&format!("p{i}"), common::random_text(rng, words))
        })
        .collect();
    let mut hit_ids: Vec<String> = corpus.iter().map(|p| p.id.clone()).collect();
    hit_ids.shuffle(rng);
    Scenario {
        question,
        corpus,
        hit_ids,
    }
}

fn base_chars(question: &QuestionItem, template: &QueryTemplate) -> usize {
    let lookup: HashMap<String, &CorpusPassage> = HashMap::new();
    let bare = augment_query(question, &[], &lookup, usize::MAX, template).unwrap();
    bare.rendered.chars().count()
}

#[test]
fn admission_matches_reference_simulation() {
    let template = QueryTemplate::default();
    let mut rng = common::rng(301);
    for _ in 0..300 {
        let n_hits = rng.random_range(1..12);
        let scenario = random_scenario(&mut rng, n_hits);
        let lookup = corpus_lookup(&scenario.corpus);
        let base = base_chars(&scenario.question, &template);
        let budget = base + rng.random_range(0..600);

        let hits = hits_for(&scenario.hit_ids);
        let aug = augment_query(&scenario.question, &hits, &lookup, budget, &template).unwrap();

        let bodies: Vec<(String, usize)> = scenario
            .hit_ids
            .iter()
            .map(|id| {
                let body = &lookup[id].body;
                (id.clone(), body.chars().count())
            })
            .collect();
        let want = greedy_with_skips_oracle(base, 2, &bodies, budget);
        let got: Vec<String> = aug.contexts.iter().map(|c| c.id.clone()).collect();
        assert_eq!(got, want, "budget {budget}, base {base}");
        assert!(aug.rendered.chars().count() <= budget);
        assert!(aug.rendered.contains(&scenario.question.prompt));
    }
}

#[test]
fn admitted_contexts_are_hit_subsequence() {
    let template = QueryTemplate::default();
    let mut rng = common::rng(302);
    for _ in 0..200 {
        let n_hits = rng.random_range(1..10);
        let scenario = random_scenario(&mut rng, n_hits);
        let lookup = corpus_lookup(&scenario.corpus);
        let base = base_chars(&scenario.question, &template);
        let budget = base + rng.random_range(0..300);
        let hits = hits_for(&scenario.hit_ids);
        let aug = augment_query(&scenario.question, &hits, &lookup, budget, &template).unwrap();

        // Subset of hits, order preserved.
        let mut cursor = 0usize;
        for context in &aug.contexts {
            let posn = scenario.hit_ids[cursor..]
                .iter()
                .position(|id| *id == context.id)
                .expect("admitted context must appear among remaining hits in order");
            cursor += posn + 1;
        }
    }
}

#[test]
fn rendering_is_pure() {
    let template = QueryTemplate::default();
    let mut rng = common::rng(303);
    let scenario = random_scenario(&mut rng, 6);
    let lookup = corpus_lookup(&scenario.corpus);
    let hits = hits_for(&scenario.hit_ids);
    let a = augment_query(&scenario.question, &hits, &lookup, 2000, &template).unwrap();
    let b = augment_query(&scenario.question, &hits, &lookup, 2000, &template).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.rendered.as_bytes(), b.rendered.as_bytes());
}

/// Set-monotonicity does not hold for skip-on-overflow admission (a larger
/// budget can admit an earlier, bigger passage and push a later small one
/// out), but the admitted character total never shrinks.
#[test]
fn admitted_character_total_is_monotone_in_budget() {
    let template = QueryTemplate::default();
    let mut rng = common::rng(304);
    for _ in 0..300 {
        let n_hits = rng.random_range(1..12);
        let scenario = random_scenario(&mut rng, n_hits);
        let lookup = corpus_lookup(&scenario.corpus);
        let base = base_chars(&scenario.question, &template);
        let b1 = base + rng.random_range(0..400);
        let b2 = b1 + rng.random_range(1..200);
        let hits = hits_for(&scenario.hit_ids);
        let small = augment_query(&scenario.question, &hits, &lookup, b1, &template).unwrap();
        let large = augment_query(&scenario.question, &hits, &lookup, b2, &template).unwrap();
        let admitted_chars = |aug: &oeq_core::augment::AugmentedQuery| -> usize {
            aug.contexts.iter().map(|c| c.text.chars().count()).sum()
        };
        assert!(
            admitted_chars(&large) >= admitted_chars(&small),
            "budget {b1} -> {b2} shrank admitted text"
        );
    }
}

#[test]
fn custom_template_controls_layout() {
    let template = QueryTemplate::parse("Q: {prompt}\nEvidence:\n{contexts}\n{options}").unwrap();
    let mut rng = common::rng(305);
    let scenario = random_scenario(&mut rng, 2);
    let lookup = corpus_lookup(&scenario.corpus);
    let hits = hits_for(&scenario.hit_ids);
    let aug = augment_query(&scenario.question, &hits, &lookup, 100_000, &template).unwrap();
    assert!(aug.rendered.starts_with("Q: "));
    let prompt_pos = aug.rendered.find(&scenario.question.prompt).unwrap();
    let evidence_pos = aug.rendered.find("Evidence:").unwrap();
    assert!(prompt_pos < evidence_pos);
}
