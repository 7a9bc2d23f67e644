use dupnet_core::estimators::{dpf_estimate, is_estimate, smc_estimate, ProposalKind, ResampleScheme, SmcConfig};
use dupnet_core::exact::ExactSolver;
use dupnet_core::rng::{derive_seed, tag};
use dupnet_core::{simulate_da, Graph, Theta};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::stats::relative_variance;

/// Column names of the relative variance table, in order.
pub const RELVAR_METHODS: [&str; 3] = ["is", "stra", "dpf"];

/// Relative variance of IS, stratified dynamic SMC and the DPF across
/// graph sizes.
#[derive(Debug, Clone)]
pub struct RelvarParams {
    pub sizes: Vec<usize>,
    pub particles: usize,
    pub reps: usize,
    /// Parameter at which the likelihood is estimated.
    pub theta: Theta,
    /// Driving value of the IS and SMC proposals.
    pub driving: Theta,
    /// Parameter the test graphs are simulated under.
    pub generating: Theta,
    pub ess_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct RelvarRow {
    pub size: usize,
    pub graph: Graph,
    pub log_exact: f64,
    /// Log estimates per method (in [`RELVAR_METHODS`] order) and repetition.
    pub log_estimates: [Vec<f64>; 3],
    pub relvar: [f64; 3],
    pub seconds: [f64; 3],
}

/// Graph of each size is simulated from a single vertex with the seed
/// derived from `(seed, size)`.
pub fn relvar_table(params: &RelvarParams) -> CliResult<Vec<RelvarRow>> {
    if params.reps == 0 {
        return Err(CliError::Usage("repetitions must be at least 1".into()));
    }
    params.sizes.iter().map(|&size| relvar_row(params, size)).collect()
}

fn relvar_row(params: &RelvarParams, size: usize) -> CliResult<RelvarRow> {
    let graph_seed = derive_seed(params.seed, tag::SIMULATE, size as u64);
    let graph = simulate_da(&Graph::empty(1), &params.generating, size, graph_seed)?.0;
    let log_exact = ExactSolver::new(&graph)?.evaluate(&params.theta).log_value;
    let proposal = ProposalKind::OptimalConditional(params.driving);
    let smc = SmcConfig::new(params.particles, proposal)
        .with_scheme(ResampleScheme::Stratified)
        .with_ess_fraction(params.ess_fraction);
    let jobs: Vec<(usize, usize)> = (0..3).flat_map(|m| (0..params.reps).map(move |r| (m, r))).collect();
    let runs: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(m, r)| {
            let seed = derive_seed(
                derive_seed(params.seed, tag::REPETITION, r as u64),
                size as u64,
                m as u64,
            );
            let start = std::time::Instant::now();
            let e = match m {
                0 => is_estimate(&graph, &params.theta, &proposal, params.particles, seed)?,
                1 => smc_estimate(&graph, &params.theta, &smc, seed)?,
                _ => dpf_estimate(&graph, &params.theta, params.particles, seed)?,
            };
            Ok((e.log_value, start.elapsed().as_secs_f64()))
        })
        .collect::<CliResult<_>>()?;
    let mut log_estimates: [Vec<f64>; 3] = Default::default();
    let mut seconds = [0.0; 3];
    for (&(m, _), (le, s)) in jobs.iter().zip(runs) {
        log_estimates[m].push(le);
        seconds[m] += s;
    }
    let relvar = if params.reps < 2 {
        [f64::NAN; 3]
    } else {
        [0, 1, 2].map(|m| relative_variance(&log_estimates[m], log_exact))
    };
    Ok(RelvarRow {
        size,
        graph,
        log_exact,
        log_estimates,
        relvar,
        seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(reps: usize) -> RelvarParams {
        let t = Theta::new(1.0, 0.66, 0.33, 0.0).unwrap();
        RelvarParams {
            sizes: vec![5, 6],
            particles: 30,
            reps,
            theta: Theta::new(1.0, 0.55, 0.33, 0.0).unwrap(),
            driving: t,
            generating: t,
            ess_fraction: 0.5,
            seed: 4,
        }
    }

    #[test]
    fn one_rep_gives_nan() {
        let rows = relvar_table(&params(1)).unwrap();
        assert!(rows.iter().all(|r| r.relvar.iter().all(|v| v.is_nan())));
    }

    #[test]
    fn rows_are_reproducible() {
        let a = relvar_table(&params(4)).unwrap();
        let b = relvar_table(&params(4)).unwrap();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.graph.active_count(), x.size);
            assert_eq!(x.log_estimates, y.log_estimates);
            assert!(x.relvar.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }
}
