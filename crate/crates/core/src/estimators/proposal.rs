use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::{exp, ln, log_sum_exp};
use crate::theta::Theta;
use crate::transition::{LogTheta, RemovalScan};

/// Proposal over the removable vertices of the current reduced graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProposalKind {
    /// Uniform over removable vertices.
    UniformRemovable,
    /// Proportional to `ω_θ0(G, v)`, the conditionally optimal proposal at the
    /// driving value `θ0`. Falls back to uniform in a state where every
    /// removable vertex has zero weight under `θ0`.
    OptimalConditional(Theta),
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Prepared {
    Uniform,
    Optimal(LogTheta),
}

impl Prepared {
    pub fn new(kind: &ProposalKind) -> Self {
        match kind {
            ProposalKind::UniformRemovable => Prepared::Uniform,
            ProposalKind::OptimalConditional(t) => Prepared::Optimal(LogTheta::new(t)),
        }
    }
}

/// A sampled removal: index into the scan, vertex label and log proposal
/// probability.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Draw {
    pub index: usize,
    pub vertex: usize,
    pub log_q: f64,
}

fn optimal_log_weights(scan: &RemovalScan, lt: &LogTheta) -> (Vec<f64>, f64) {
    let lw: Vec<f64> = (0..scan.len()).map(|i| scan.log_weight(i, lt)).collect();
    let total = log_sum_exp(&lw);
    (lw, total)
}

/// Samples one removable vertex. The scan must be nonempty.
pub(crate) fn draw<R: Rng + ?Sized>(scan: &RemovalScan, prepared: &Prepared, rng: &mut R) -> Draw {
    let m = scan.len();
    debug_assert!(m > 0);
    if let Prepared::Optimal(lt) = prepared {
        let (lw, total) = optimal_log_weights(scan, lt);
        if total > f64::NEG_INFINITY {
            let u: f64 = rng.gen();
            let mut cum = 0.0;
            let mut chosen = None;
            for (i, &w) in lw.iter().enumerate() {
                if w == f64::NEG_INFINITY {
                    continue;
                }
                cum += exp(w - total);
                chosen = Some(i);
                if u < cum {
                    break;
                }
            }
            let index = chosen.expect("positive total implies a positive weight");
            return Draw {
                index,
                vertex: scan.vertex(index),
                log_q: lw[index] - total,
            };
        }
    }
    let index = rng.gen_range(0..m);
    Draw {
        index,
        vertex: scan.vertex(index),
        log_q: -ln(m as f64),
    }
}

/// Proposal probability of every removable vertex, ascending by label.
pub fn proposal_probabilities(g: &Graph, kind: &ProposalKind) -> Result<Vec<(usize, f64)>> {
    let scan = RemovalScan::new(g);
    if scan.is_empty() {
        return Err(Error::Irreducible);
    }
    let m = scan.len() as f64;
    let uniform = || scan.vertices().iter().map(|&v| (v, 1.0 / m)).collect();
    Ok(match Prepared::new(kind) {
        Prepared::Uniform => uniform(),
        Prepared::Optimal(lt) => {
            let (lw, total) = optimal_log_weights(&scan, &lt);
            if total == f64::NEG_INFINITY {
                uniform()
            } else {
                scan.vertices()
                    .iter()
                    .zip(lw)
                    .map(|(&v, w)| (v, exp(w - total)))
                    .collect()
            }
        }
    })
}

/// Draws a removable vertex of `g` and returns it with its proposal
/// probability.
pub fn propose_vertex<R: Rng + ?Sized>(g: &Graph, kind: &ProposalKind, rng: &mut R) -> Result<(usize, f64)> {
    let scan = RemovalScan::new(g);
    if scan.is_empty() {
        return Err(Error::Irreducible);
    }
    let d = draw(&scan, &Prepared::new(kind), rng);
    Ok((d.vertex, exp(d.log_q)))
}
