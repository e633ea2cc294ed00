//! Seeded generators shared by the oracle test suites.

#![allow(dead_code)]

use oeq_core::model::{
    GoldLabel, QuestionItem, RankedOption, RankedPrediction, RaterJudgment, ResponseOption,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const WORDS: [&str; 16] = [
    "oxidation", "orbit", "enzyme", "tensor", "quartz", "neuron", "isotope", "vector",
    "gradient", "photon", "lattice", "plasma", "archive", "cipher", "glacier", "reactor",
];

pub fn random_text(rng: &mut ChaCha8Rng, words: usize) -> String {
    (0..words)
        .map(|_| WORDS[rng.random_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn option_letters(n: usize) -> Vec<String> {
    (0..n).map(|i| char::from(b'A' + i as u8).to_string()).collect()
}

pub fn random_question(rng: &mut ChaCha8Rng, id: &str, n_options: usize) -> QuestionItem {
    let options = option_letters(n_options)
        .into_iter()
        .map(|oid| ResponseOption {
            text: format!("{} {}", random_text(rng, 4), oid),
            id: oid,
        })
        .collect();
    QuestionItem {
        id: id.to_string(),
        prompt: format!("{}?", random_text(rng, 6)),
        options,
        category: None,
        gold: None,
    }
}

/// Random full ranking over the question's options, already sorted with the
/// canonical tie policy.
pub fn random_prediction(rng: &mut ChaCha8Rng, question: &QuestionItem) -> RankedPrediction {
    let scores = question
        .options
        .iter()
        .map(|o| RankedOption {
            id: o.id.clone(),
            // Coarse grid on purpose: ties must show up often.
            score: (rng.random_range(0..8) as f64) / 4.0,
        })
        .collect();
    RankedPrediction::from_scores(question.id.clone(), scores)
}

pub fn random_permutation(rng: &mut ChaCha8Rng, ids: &[String]) -> Vec<String> {
    let mut order = ids.to_vec();
    order.shuffle(rng);
    order
}

pub fn random_gold(rng: &mut ChaCha8Rng, question: &QuestionItem) -> GoldLabel {
    let ids = question.option_ids();
    if rng.random_bool(0.5) {
        GoldLabel::SingleCorrect(ids[rng.random_range(0..ids.len())].clone())
    } else {
        GoldLabel::HumanOrder(random_permutation(rng, &ids))
    }
}

/// One random judgment with top1 inside a 3-element top3.
pub fn random_judgment(
    rng: &mut ChaCha8Rng,
    rater_id: &str,
    question: &QuestionItem,
) -> RaterJudgment {
    let ids = question.option_ids();
    let picks = random_permutation(rng, &ids);
    let top3: Vec<String> = picks.into_iter().take(3).collect();
    RaterJudgment {
        rater_id: rater_id.to_string(),
        question_id: question.id.clone(),
        top1: top3[rng.random_range(0..3)].clone(),
        top3,
    }
}
