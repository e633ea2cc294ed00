//! Recount and sort oracles for judgment aggregation, plus the ordering
//! invariances.

mod common;

use oeq_core::model::GoldLabel;
use oeq_core::raters::{
    aggregate_scores, aggregate_scores_weighted, rank_by_score, tally, OptionTally,
};
use rand::prelude::*;

#[test]
fn tallies_match_direct_recount_on_random_panels() {
    let mut rng = common::rng(201);
    for case in 0..100 {
        let n_options = rng.random_range(4..=6);
        let question = common::random_question(&mut rng, &format!("q{case}"), n_options);
        let n_raters = rng.random_range(1..=7);
        let judgments: Vec<_> = (0..n_raters)
            .map(|r| common::random_judgment(&mut rng, &format!("t{r}"), &question))
            .collect();
        let option_ids = question.option_ids();
        let tallies = tally(&judgments, &option_ids).unwrap();

        // Direct recount, one pass per (option, judgment) pair.
        for t in &tallies {
            let mut top1 = 0;
            let mut top3_only = 0;
            let mut outside = 0;
            for j in &judgments {
                if j.top1 == t.option_id {
                    top1 += 1;
                } else if j.top3.contains(&t.option_id) {
                    top3_only += 1;
                } else {
                    outside += 1;
                }
            }
            assert_eq!((t.top1_votes, t.top3_only_votes, t.outside_votes), (top1, top3_only, outside));
        }

        let sum_top1: usize = tallies.iter().map(|t| t.top1_votes).sum();
        let sum_top3: usize = tallies
            .iter()
            .map(|t| t.top1_votes + t.top3_only_votes)
            .sum();
        assert_eq!(sum_top1, n_raters);
        assert_eq!(sum_top3, 3 * n_raters);
    }
}

fn random_tallies(rng: &mut rand_chacha::ChaCha8Rng, n_options: usize, raters: usize) -> Vec<OptionTally> {
    common::option_letters(n_options)
        .into_iter()
        .map(|id| {
            let top1 = rng.random_range(0..=raters);
            let top3_only = rng.random_range(0..=(raters - top1));
            OptionTally {
                option_id: id,
                top1_votes: top1,
                top3_only_votes: top3_only,
                outside_votes: raters - top1 - top3_only,
            }
        })
        .collect()
}

#[test]
fn ranking_matches_brute_force_sort_on_thousand_panels() {
    let mut rng = common::rng(202);
    for _ in 0..1000 {
        let n_options = rng.random_range(2..=6);
        let raters = rng.random_range(1..=5);
        let tallies = random_tallies(&mut rng, n_options, raters);
        let scores = aggregate_scores(&tallies, raters).unwrap();
        let GoldLabel::HumanOrder(order) = rank_by_score(&scores, &tallies).unwrap() else {
            panic!("expected an order");
        };

        // Independent sort with the same key, built from scratch.
        let mut want: Vec<(f64, usize, usize, String)> = tallies
            .iter()
            .map(|t| {
                let score = (7 * t.top1_votes + 3 * t.top3_only_votes + t.outside_votes) as f64
                    / raters as f64;
                (score, t.top1_votes, t.top3_only_votes, t.option_id.clone())
            })
            .collect();
        want.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap()
                .then(b.1.cmp(&a.1))
                .then(b.2.cmp(&a.2))
                .then(a.3.cmp(&b.3))
        });
        let want_ids: Vec<String> = want.into_iter().map(|(_, _, _, id)| id).collect();
        assert_eq!(order, want_ids);

        // Permutation of the option set.
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(sorted, common::option_letters(n_options));
    }
}

#[test]
fn ordering_is_invariant_under_weight_scaling() {
    let mut rng = common::rng(203);
    for _ in 0..300 {
        let n_options = rng.random_range(2..=6);
        let raters = rng.random_range(1..=5);
        let tallies = random_tallies(&mut rng, n_options, raters);
        let base = aggregate_scores(&tallies, raters).unwrap();
        let factor = [0.5, 2.0, 10.0][rng.random_range(0..3)];
        let scaled = aggregate_scores_weighted(
            &tallies,
            raters,
            (7.0 * factor, 3.0 * factor, 1.0 * factor),
        )
        .unwrap();
        assert_eq!(
            rank_by_score(&base, &tallies).unwrap(),
            rank_by_score(&scaled, &tallies).unwrap()
        );
    }
}

#[test]
fn score_mean_matches_closed_form() {
    // Every rater hands out one top1, two top3-only and (n-3) outside votes,
    // so the mean score over options has a closed form.
    let mut rng = common::rng(204);
    for case in 0..100 {
        let n_options = rng.random_range(4..=6);
        let question = common::random_question(&mut rng, &format!("q{case}"), n_options);
        let raters = rng.random_range(1..=5);
        let judgments: Vec<_> = (0..raters)
            .map(|r| common::random_judgment(&mut rng, &format!("t{r}"), &question))
            .collect();
        let tallies = tally(&judgments, &question.option_ids()).unwrap();
        let scores = aggregate_scores(&tallies, raters).unwrap();

        let mean: f64 = scores.iter().map(|s| s.score).sum::<f64>() / n_options as f64;
        let r = raters as f64;
        let n = n_options as f64;
        let closed_form = (7.0 * r + 3.0 * (3.0 * r - r) + (n * r - 3.0 * r)) / (r * n);
        assert!((mean - closed_form).abs() < 1e-12, "{mean} vs {closed_form}");

        for s in &scores {
            assert!(s.score >= 1.0 - 1e-12 && s.score <= 7.0 + 1e-12);
        }
    }
}

#[test]
fn pipeline_is_deterministic_for_fixed_input() {
    let mut rng = common::rng(205);
    let question = common::random_question(&mut rng, "q0", 5);
    let judgments: Vec<_> = (0..3)
        .map(|r| common::random_judgment(&mut rng, &format!("t{r}"), &question))
        .collect();
    let run = || {
        let tallies = tally(&judgments, &question.option_ids()).unwrap();
        let scores = aggregate_scores(&tallies, 3).unwrap();
        rank_by_score(&scores, &tallies).unwrap()
    };
    assert_eq!(run(), run());
}
