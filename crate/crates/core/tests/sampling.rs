//! Sampling through the chain reproduces the chain's output distribution.

use psychess_core::board::BoardState;
use psychess_core::chain::{apply_chain, builtin, StageMask};
use psychess_core::policy::{HeuristicPolicy, PolicySource};
use psychess_core::MoveDistribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SAMPLES: usize = 10_000;

/// Pearson goodness-of-fit p-value of sampled counts against `d`.
fn fit_p_value(d: &MoveDistribution, counts: &[usize]) -> f64 {
    let n = counts.iter().sum::<usize>() as f64;
    let mut stat = 0.0;
    let mut cells = 0;
    for (&p, &c) in d.probs().iter().zip(counts) {
        if p > 0.0 {
            let e = n * p;
            stat += (c as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    ChiSquared::new((cells - 1) as f64).unwrap().sf(stat)
}

fn sample_counts(d: &MoveDistribution, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0; d.len()];
    for _ in 0..SAMPLES {
        counts[d.sample_index(rng.gen())] += 1;
    }
    counts
}

fn opening_policy() -> MoveDistribution {
    HeuristicPolicy::new(1.0).distribution(&BoardState::initial())
}

#[test]
fn flat_preset_samples_the_raw_policy() {
    let raw = opening_policy();
    let flat = builtin("flat").unwrap();
    for (i, psi) in [-90.0, 0.0, 75.0].into_iter().enumerate() {
        let (shaped, _) = apply_chain(&raw, psi, &flat, 0.5, StageMask::FULL);
        let counts = sample_counts(&shaped, 100 + i as u64);
        let p = fit_p_value(&raw, &counts);
        assert!(p > 1e-3, "ψ = {psi}: goodness-of-fit p = {p}");
    }
}

#[test]
fn shaped_samples_follow_the_shaped_distribution() {
    let raw = opening_policy();
    let human = builtin("human").unwrap();
    for (i, psi) in [-100.0, -40.0, 100.0].into_iter().enumerate() {
        let (shaped, _) = apply_chain(&raw, psi, &human, 0.3, StageMask::FULL);
        let counts = sample_counts(&shaped, 200 + i as u64);
        let p = fit_p_value(&shaped, &counts);
        assert!(p > 1e-3, "ψ = {psi}: goodness-of-fit p = {p}");
        // Gated-out moves are never drawn.
        for (&q, &c) in shaped.probs().iter().zip(&counts) {
            if q == 0.0 {
                assert_eq!(c, 0);
            }
        }
    }
}

#[test]
fn stress_spreads_and_overconfidence_sharpens() {
    let raw = opening_policy();
    let human = builtin("human").unwrap();
    let (stress, _) = apply_chain(&raw, -100.0, &human, 0.3, StageMask::FULL);
    let (neutral, _) = apply_chain(&raw, 0.0, &human, 0.3, StageMask::FULL);
    let (over, _) = apply_chain(&raw, 100.0, &human, 0.3, StageMask::FULL);
    let top = |d: &MoveDistribution| d.prob_of(raw.argmax());
    assert!(top(&stress) < top(&neutral));
    assert!(top(&neutral) < top(&over));
}
