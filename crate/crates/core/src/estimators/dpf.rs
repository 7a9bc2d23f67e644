use alloc::vec::Vec;

use hashbrown::HashMap;
use rand::Rng;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::{ln, log_sum_exp, normalize_log_weights, LogSum};
use crate::rng::{stream, tag};
use crate::theta::Theta;
use crate::transition::{LogTheta, RemovalScan};

use super::diagnostics::ess;
use super::estimate::{LikelihoodEstimate, Method, StepDiagnostics};

/// Solves `Σ min(1, C w_i) = n` for `C`, given more than `n` positive
/// weights (zeros are ignored).
pub fn dpf_threshold_solve(weights: &[f64], n: usize) -> Result<f64> {
    let mut w: Vec<f64> = weights.iter().copied().filter(|&x| x > 0.0).collect();
    if n == 0 || w.len() <= n {
        return Err(Error::InvalidArgument(alloc::format!(
            "threshold needs more than {n} positive weights, got {}",
            w.len()
        )));
    }
    w.sort_by(|a, b| b.total_cmp(a));
    let mut tail = alloc::vec![0.0; w.len() + 1];
    for i in (0..w.len()).rev() {
        tail[i] = tail[i + 1] + w[i];
    }
    for k in 0..n {
        let c = (n - k) as f64 / tail[k];
        if c * w[k] <= 1.0 + 1e-12 {
            return Ok(c);
        }
    }
    unreachable!("a segment always satisfies the threshold equation")
}

/// Reduces a weighted support to at most `n` entries without bias.
///
/// Entries with `C w̄ ≥ 1` are kept with their weight; the others are
/// resampled systematically with offset `U ∈ (0, 1/(n - kept)]` and each
/// survivor gets weight `1/C`. Returns `(index, log weight)` pairs in index
/// order. Supports of at most `n` positive entries are returned unchanged.
pub(crate) fn threshold_resample<R: Rng + ?Sized>(
    normalized: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<(Vec<(usize, f64)>, bool)> {
    let positive = normalized.iter().filter(|&&w| w > 0.0).count();
    if positive <= n {
        let all = normalized
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, &w)| (i, ln(w)))
            .collect();
        return Ok((all, false));
    }
    let c = dpf_threshold_solve(normalized, n)?;
    let kept = normalized.iter().filter(|&&w| w > 0.0 && c * w >= 1.0).count();
    let slots = n - kept;
    let rest_total: f64 = normalized.iter().filter(|&&w| w > 0.0 && c * w < 1.0).sum();
    let offset = (1.0 - rng.gen::<f64>()) / slots as f64;
    let log_inv_c = -ln(c);
    let last_rest = normalized.iter().rposition(|&w| w > 0.0 && c * w < 1.0);
    let mut out = Vec::with_capacity(n);
    let mut cum = 0.0;
    let mut j = 0;
    for (i, &w) in normalized.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        if c * w >= 1.0 {
            out.push((i, ln(w)));
            continue;
        }
        cum = if Some(i) == last_rest {
            1.0
        } else {
            cum + w / rest_total
        };
        let mut hit = false;
        while j < slots && offset + j as f64 / slots as f64 <= cum {
            hit = true;
            j += 1;
        }
        if hit {
            out.push((i, log_inv_c));
        }
    }
    Ok((out, true))
}

/// Weighted set of distinct reduced states, in first-insertion order.
#[derive(Default)]
pub(crate) struct Support {
    states: Vec<(Graph, LogSum)>,
    index: HashMap<VertexSet, usize>,
}

impl Support {
    pub fn add(&mut self, g: Graph, log_w: f64) {
        if log_w == f64::NEG_INFINITY {
            return;
        }
        match self.index.get(g.active()) {
            Some(&i) => self.states[i].1.add(log_w),
            None => {
                self.index.insert(g.active().clone(), self.states.len());
                let mut acc = LogSum::new();
                acc.add(log_w);
                self.states.push((g, acc));
            }
        }
    }

    pub fn into_entries(self) -> Vec<(Graph, f64)> {
        self.states.into_iter().map(|(g, w)| (g, w.value())).collect()
    }
}

/// Discrete particle filter estimate of `L_θ(g)` with support budget `n`.
///
/// Each step expands every retained state by all of its removable vertices,
/// weighting a child by `ω_θ / |G|` times the parent's normalized weight,
/// and merges children that are the same reduced graph. States with no
/// removable vertex carry over unchanged. When the support exceeds `n`
/// states it is thinned by [`dpf_threshold_solve`]-based resampling. The
/// estimate is the product over steps of the total child weight; it is exact
/// whenever no thinning is needed.
pub fn dpf_estimate(g: &Graph, theta: &Theta, n: usize, seed: u64) -> Result<LikelihoodEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("particle count must be positive".into()));
    }
    let lt = LogTheta::new(theta);
    let mut retained: Vec<(Graph, f64)> = alloc::vec![(g.clone(), 0.0)];
    let mut segments = Vec::new();
    let mut trace: Vec<StepDiagnostics> = Vec::new();
    let mut resample_steps = Vec::new();
    let mut scan = RemovalScan::default();
    for k in 0.. {
        let mut support = Support::default();
        let mut moved = false;
        for (state, factor) in retained {
            scan.fill(&state);
            if scan.is_empty() {
                support.add(state, factor);
                continue;
            }
            moved = true;
            let size = ln(scan.n_active() as f64);
            for i in 0..scan.len() {
                let lw = scan.log_weight(i, &lt);
                if lw == f64::NEG_INFINITY {
                    continue;
                }
                let child = state.delete_vertex(scan.vertex(i)).expect("scanned vertex is active");
                support.add(child, factor + lw - size);
            }
        }
        if !moved {
            break;
        }
        let entries = support.into_entries();
        let log_w: Vec<f64> = entries.iter().map(|e| e.1).collect();
        let increment = log_sum_exp(&log_w);
        segments.push(increment);
        if increment == f64::NEG_INFINITY {
            let mut e = LikelihoodEstimate::collapsed(Method::Dpf);
            trace.push(StepDiagnostics {
                step: k,
                ess: 0.0,
                unique: 0,
                resampled: false,
                log_increment: increment,
            });
            e.trace = trace;
            return Ok(e);
        }
        let normalized = normalize_log_weights(&log_w).expect("positive total");
        let (chosen, resampled) = threshold_resample(&normalized, n, &mut stream(seed, tag::RESAMPLE, k as u64))?;
        if resampled {
            resample_steps.push(k);
        }
        trace.push(StepDiagnostics {
            step: k,
            ess: ess(&normalized).unwrap_or(0.0),
            unique: entries.len(),
            resampled,
            log_increment: increment,
        });
        let mut slots: Vec<Option<Graph>> = entries.into_iter().map(|e| Some(e.0)).collect();
        retained = chosen
            .into_iter()
            .map(|(i, w)| (slots[i].take().expect("each index chosen once"), w))
            .collect();
    }
    let mut e = LikelihoodEstimate::from_segments(Method::Dpf, segments);
    e.trace = trace;
    e.resample_steps = resample_steps;
    Ok(e)
}
