use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::normalize_log_weights;

/// Effective sample size `1 / Σ w̄²` of normalized weights.
///
/// Raw weights that are all zero signal a collapsed estimator.
pub fn ess(normalized: &[f64]) -> Result<f64> {
    let total: f64 = normalized.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::WeightCollapse);
    }
    let sum_sq: f64 = normalized.iter().map(|w| (w / total) * (w / total)).sum();
    Ok(1.0 / sum_sq)
}

/// Effective sample size of unnormalized log weights.
pub fn ess_from_log_weights(log_weights: &[f64]) -> Result<f64> {
    let normalized = normalize_log_weights(log_weights).ok_or(Error::WeightCollapse)?;
    ess(&normalized)
}

/// Tracks which particles share a removal path, for the unique-particle
/// count.
#[derive(Debug, Clone)]
pub(crate) struct Lineage {
    classes: Vec<u32>,
}

impl Lineage {
    pub fn new(n: usize) -> Self {
        Self {
            classes: alloc::vec![0; n],
        }
    }

    /// Extends every path by its move (`None` for a particle that did not
    /// move) and returns the number of distinct paths.
    pub fn advance(&mut self, moves: &[Option<usize>]) -> usize {
        let mut keys: Vec<(u32, usize, usize)> = self
            .classes
            .iter()
            .zip(moves)
            .enumerate()
            .map(|(i, (&c, m))| (c, m.unwrap_or(usize::MAX), i))
            .collect();
        keys.sort_unstable();
        let mut next = 0u32;
        for j in 0..keys.len() {
            if j > 0 && (keys[j].0, keys[j].1) != (keys[j - 1].0, keys[j - 1].1) {
                next += 1;
            }
            self.classes[keys[j].2] = next;
        }
        if keys.is_empty() {
            0
        } else {
            next as usize + 1
        }
    }

    pub fn resample(&mut self, ancestors: &[usize]) {
        self.classes = ancestors.iter().map(|&a| self.classes[a]).collect();
    }
}
