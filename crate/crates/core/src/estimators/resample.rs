use alloc::vec::Vec;

use rand::Rng;

/// Resampling scheme for SMC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResampleScheme {
    /// Independent draws from the weights.
    Multinomial,
    /// One uniform offset `U ∈ (0, 1/N]` and the evenly spaced points
    /// `U + j/N`; offspring counts are `⌊N w̄⌋` or `⌈N w̄⌉`.
    Stratified,
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// Index `i` with `Q(i-1) < u ≤ Q(i)`, skipping zero-weight entries.
fn locate(cum: &[f64], weights: &[f64], u: f64, from: usize) -> usize {
    let mut i = from;
    while i + 1 < cum.len() && (u > cum[i] || weights[i] == 0.0) {
        i += 1;
    }
    i
}

/// Draws `count` ancestor indices from normalized `weights`.
pub fn resample<R: Rng + ?Sized>(weights: &[f64], count: usize, scheme: ResampleScheme, rng: &mut R) -> Vec<usize> {
    if weights.is_empty() {
        return Vec::new();
    }
    let total: f64 = weights.iter().sum();
    let cum: Vec<f64> = cumulative(weights).into_iter().map(|c| c / total).collect();
    match scheme {
        ResampleScheme::Multinomial => (0..count)
            .map(|_| {
                let u = 1.0 - rng.gen::<f64>();
                let i = cum.partition_point(|&c| c < u);
                locate(&cum, weights, u, i.min(cum.len() - 1))
            })
            .collect(),
        ResampleScheme::Stratified => {
            let offset = 1.0 - rng.gen::<f64>();
            let mut out = Vec::with_capacity(count);
            let mut i = 0;
            for j in 0..count {
                let u = (offset + j as f64) / count as f64;
                i = locate(&cum, weights, u, i);
                out.push(i);
            }
            out
        }
    }
}
