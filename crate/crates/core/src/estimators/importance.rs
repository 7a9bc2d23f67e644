use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::{ln, log_mean_exp, log_sum_exp};
use crate::rng::stream;
use crate::simulate::RemovalPath;
use crate::theta::Theta;
use crate::transition::{log_transition_weight, LogTheta, RemovalScan};

use super::diagnostics::{ess_from_log_weights, Lineage};
use super::estimate::{LikelihoodEstimate, Method, StepDiagnostics};
use super::map_indices;
use super::proposal::{draw, Prepared, ProposalKind};

/// One sampled removal path with the log proposal probability of each step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub path: RemovalPath,
    pub log_q: Vec<f64>,
}

struct Sampled {
    trajectory: Trajectory,
    /// Cumulative log weight after each step (only when a target is given).
    cumulative: Vec<f64>,
}

fn sample_one(g: &Graph, prepared: &Prepared, target: Option<&LogTheta>, seed: u64, i: usize) -> Sampled {
    let mut graph = g.clone();
    let mut scan = RemovalScan::new(&graph);
    let mut path = Vec::new();
    let mut log_q = Vec::new();
    let mut cumulative = Vec::new();
    let mut log_w = 0.0;
    let mut k = 0;
    while !scan.is_empty() {
        let mut rng = stream(seed, i as u64, k as u64);
        let d = draw(&scan, prepared, &mut rng);
        if let Some(lt) = target {
            log_w += scan.log_weight(d.index, lt) - ln(scan.n_active() as f64) - d.log_q;
            cumulative.push(log_w);
        }
        path.push(d.vertex);
        log_q.push(d.log_q);
        graph = graph.delete_vertex(d.vertex).expect("scanned vertex is active");
        scan.fill(&graph);
        k += 1;
    }
    Sampled {
        trajectory: Trajectory {
            path: RemovalPath(path),
            log_q,
        },
        cumulative,
    }
}

/// Samples `n` independent removal paths of `g` from the proposal.
///
/// Trajectory `i` draws step `k` from the stream `(seed, i, k)`, the same
/// draws the `i`-th particle of [`super::smc_estimate`] uses when it never
/// resamples.
pub fn sample_trajectories(g: &Graph, proposal: &ProposalKind, n: usize, seed: u64) -> Vec<Trajectory> {
    let prepared = Prepared::new(proposal);
    map_indices(n, |i| sample_one(g, &prepared, None, seed, i).trajectory)
}

fn check_particles(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("particle count must be positive".into()));
    }
    Ok(())
}

fn step_trace(samples: &[Sampled]) -> Vec<StepDiagnostics> {
    let n = samples.len();
    let steps = samples.iter().map(|s| s.cumulative.len()).max().unwrap_or(0);
    let mut lineage = Lineage::new(n);
    let mut prev_total = ln(n as f64);
    let mut trace = Vec::with_capacity(steps);
    for k in 0..steps {
        let column: Vec<f64> = samples
            .iter()
            .map(|s| s.cumulative.get(k).or(s.cumulative.last()).copied().unwrap_or(0.0))
            .collect();
        let moves: Vec<Option<usize>> = samples
            .iter()
            .map(|s| s.trajectory.path.as_slice().get(k).copied())
            .collect();
        let unique = lineage.advance(&moves);
        let total = log_sum_exp(&column);
        trace.push(StepDiagnostics {
            step: k,
            ess: ess_from_log_weights(&column).unwrap_or(0.0),
            unique,
            resampled: false,
            log_increment: total - prev_total,
        });
        prev_total = total;
    }
    trace
}

/// Importance sampling estimate of `L_θ(g)` from `n` independent removal
/// paths.
///
/// Each path is weighted by `Π ω_θ(G_k, v_k) / (|G_k| q(v_k | G_k))` and the
/// estimate is the mean weight. The trace records, per step, the ESS and the
/// number of distinct path prefixes.
pub fn is_estimate(
    g: &Graph,
    theta: &Theta,
    proposal: &ProposalKind,
    n: usize,
    seed: u64,
) -> Result<LikelihoodEstimate> {
    check_particles(n)?;
    let prepared = Prepared::new(proposal);
    let lt = LogTheta::new(theta);
    let samples = map_indices(n, |i| sample_one(g, &prepared, Some(&lt), seed, i));
    let log_w: Vec<f64> = samples
        .iter()
        .map(|s| s.cumulative.last().copied().unwrap_or(0.0))
        .collect();
    let mean = log_mean_exp(&log_w);
    if mean == f64::NEG_INFINITY {
        let mut e = LikelihoodEstimate::collapsed(Method::Is);
        e.trace = step_trace(&samples);
        return Ok(e);
    }
    let mut e = LikelihoodEstimate::from_segments(Method::Is, alloc::vec![mean]);
    e.final_ess = ess_from_log_weights(&log_w).ok();
    e.trace = step_trace(&samples);
    Ok(e)
}

/// Importance sampling estimates at every parameter in `grid` from one set
/// of `n` paths drawn under `proposal`.
///
/// Reweighting a path at the proposal's own driving value reproduces
/// [`is_estimate`] bit for bit.
pub fn is_reweight_curve(
    g: &Graph,
    proposal: &ProposalKind,
    grid: &[Theta],
    n: usize,
    seed: u64,
) -> Result<Vec<LikelihoodEstimate>> {
    check_particles(n)?;
    let trajectories = sample_trajectories(g, proposal, n, seed);
    let targets: Vec<LogTheta> = grid.iter().map(LogTheta::new).collect();
    let weights: Vec<Vec<f64>> = map_indices(n, |i| {
        let t = &trajectories[i];
        let mut graph = g.clone();
        let mut log_w = alloc::vec![0.0; targets.len()];
        for (&v, &lq) in t.path.as_slice().iter().zip(&t.log_q) {
            let size = ln(graph.active_count() as f64);
            for (w, lt) in log_w.iter_mut().zip(&targets) {
                *w += log_transition_weight(&graph, v, lt) - size - lq;
            }
            graph = graph.delete_vertex(v).expect("path vertex is active");
        }
        log_w
    });
    Ok((0..grid.len())
        .map(|j| {
            let column: Vec<f64> = weights.iter().map(|w| w[j]).collect();
            let mean = log_mean_exp(&column);
            if mean == f64::NEG_INFINITY {
                LikelihoodEstimate::collapsed(Method::Is)
            } else {
                let mut e = LikelihoodEstimate::from_segments(Method::Is, alloc::vec![mean]);
                e.final_ess = ess_from_log_weights(&column).ok();
                e
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_likelihood;
    use crate::graph::fixtures::*;

    fn theta0() -> Theta {
        Theta::new(1.0, 0.66, 0.33, 0.0).unwrap()
    }

    #[test]
    fn triangle_has_zero_variance() {
        for seed in 0..5 {
            let e = is_estimate(&k3(), &theta0(), &ProposalKind::UniformRemovable, 10, seed).unwrap();
            assert!((e.value() - 0.071874).abs() < 1e-12);
            assert!((e.final_ess.unwrap() - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn optimal_proposal_is_exact_on_path() {
        let e = is_estimate(&path3(), &theta0(), &ProposalKind::OptimalConditional(theta0()), 7, 1).unwrap();
        assert!((e.value() - 0.060984).abs() < 1e-12);
    }

    #[test]
    fn irreducible_input_is_one() {
        let e = is_estimate(&cycle(5), &theta0(), &ProposalKind::UniformRemovable, 3, 0).unwrap();
        assert_eq!(e.log_value, 0.0);
        assert!(e.trace.is_empty());
    }

    #[test]
    fn reweighting_at_driving_value_matches() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (1, 5), (2, 5)]).unwrap();
        let t0 = Theta::new(0.8, 0.5, 0.4, 0.3).unwrap();
        let other = Theta::new(0.6, 0.3, 0.7, 0.2).unwrap();
        let kind = ProposalKind::OptimalConditional(t0);
        let curve = is_reweight_curve(&g, &kind, &[t0, other], 50, 4).unwrap();
        let direct = is_estimate(&g, &t0, &kind, 50, 4).unwrap();
        assert_eq!(curve[0].log_value.to_bits(), direct.log_value.to_bits());
        let direct_other = is_estimate(&g, &other, &kind, 50, 4).unwrap();
        assert!((curve[1].log_value - direct_other.log_value).abs() < 1e-12);
    }

    #[test]
    fn trace_is_consistent() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (1, 5), (2, 5)]).unwrap();
        let e = is_estimate(&g, &theta0(), &ProposalKind::UniformRemovable, 40, 2).unwrap();
        let sum: f64 = e.trace.iter().map(|d| d.log_increment).sum();
        assert!((sum - e.log_value).abs() < 1e-9);
        for d in &e.trace {
            assert!(d.unique >= 1 && d.unique <= 40);
            assert!(d.ess == 0.0 || (1.0 - 1e-9..=40.0 + 1e-9).contains(&d.ess));
        }
        let exact = exact_likelihood(&g, &theta0()).unwrap();
        assert!(e.value() > 0.0 && exact.value() > 0.0);
    }

    #[test]
    fn zero_particles_rejected() {
        assert!(is_estimate(&k3(), &theta0(), &ProposalKind::UniformRemovable, 0, 0).is_err());
    }
}
