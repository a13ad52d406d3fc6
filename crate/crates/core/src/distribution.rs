//! Probability distributions over the legal moves of a position.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::MoveId;

/// Tolerance on the total mass of a valid distribution.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Mass below this after a stage is flushed to zero.
pub const FLUSH_FLOOR: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("distribution is empty")]
    Empty,
    #[error("probability for {0} is negative or not finite")]
    BadProbability(MoveId),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("moves are not in canonical order or repeat")]
    Unordered,
}

/// Ordered `(move, probability)` pairs, canonical move order, mass one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveDistribution {
    moves: Vec<MoveId>,
    probs: Vec<f64>,
}

impl MoveDistribution {
    /// Validates an already-normalized distribution.
    pub fn new(moves: Vec<MoveId>, probs: Vec<f64>) -> Result<Self, DistributionError> {
        Self::check_shape(&moves, &probs)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(DistributionError::NotNormalized(total));
        }
        Ok(MoveDistribution { moves, probs })
    }

    /// Normalizes non-negative weights. All-zero weights give the uniform
    /// distribution.
    pub fn from_weights(moves: Vec<MoveId>, weights: Vec<f64>) -> Result<Self, DistributionError> {
        Self::check_shape(&moves, &weights)?;
        let mut d = MoveDistribution {
            moves,
            probs: weights,
        };
        if d.probs.iter().sum::<f64>() <= 0.0 {
            let n = d.probs.len() as f64;
            d.probs.iter_mut().for_each(|p| *p = 1.0 / n);
        } else {
            d.normalize();
        }
        Ok(d)
    }

    pub fn uniform(moves: Vec<MoveId>) -> Result<Self, DistributionError> {
        let n = moves.len();
        Self::from_weights(moves, vec![1.0; n])
    }

    pub fn point_mass(moves: Vec<MoveId>, index: usize) -> Result<Self, DistributionError> {
        let mut w = vec![0.0; moves.len()];
        if let Some(slot) = w.get_mut(index) {
            *slot = 1.0;
        }
        Self::from_weights(moves, w)
    }

    fn check_shape(moves: &[MoveId], probs: &[f64]) -> Result<(), DistributionError> {
        if moves.is_empty() {
            return Err(DistributionError::Empty);
        }
        assert_eq!(moves.len(), probs.len(), "moves and probabilities differ in length");
        if moves.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DistributionError::Unordered);
        }
        for (m, p) in moves.iter().zip(probs) {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(DistributionError::BadProbability(*m));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn moves(&self) -> &[MoveId] {
        &self.moves
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (MoveId, f64)> + '_ {
        self.moves.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn prob_of(&self, m: MoveId) -> f64 {
        self.moves
            .binary_search(&m)
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }

    /// Index of the most probable move; ties go to the earlier move.
    pub fn argmax_index(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    pub fn argmax(&self) -> MoveId {
        self.moves[self.argmax_index()]
    }

    pub fn max_prob(&self) -> f64 {
        self.probs[self.argmax_index()]
    }

    /// Inverse-CDF sample over canonical order with a uniform draw in [0, 1).
    pub fn sample_index(&self, draw: f64) -> usize {
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last_positive = i;
                if draw < acc {
                    return i;
                }
            }
        }
        // Rounding left a sliver above the final cumulative value.
        last_positive
    }

    pub fn sample(&self, draw: f64) -> MoveId {
        self.moves[self.sample_index(draw)]
    }

    /// Shannon entropy in nats, with 0·ln 0 = 0.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    pub fn sup_distance(&self, other: &MoveDistribution) -> f64 {
        assert_eq!(self.moves, other.moves, "distributions over different supports");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Replaces the probabilities, flushing denormal noise and renormalizing.
    pub(crate) fn with_weights(&self, weights: Vec<f64>) -> MoveDistribution {
        debug_assert_eq!(weights.len(), self.probs.len());
        let mut d = MoveDistribution {
            moves: self.moves.clone(),
            probs: weights,
        };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        for p in self.probs.iter_mut() {
            if *p < FLUSH_FLOOR {
                *p = 0.0;
            }
        }
        let total: f64 = self.probs.iter().sum();
        if total > 0.0 {
            self.probs.iter_mut().for_each(|p| *p /= total);
        }
    }
}
