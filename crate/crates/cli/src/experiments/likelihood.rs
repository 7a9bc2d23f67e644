use std::time::Instant;

use dupnet_core::estimators::LikelihoodEstimate;
use dupnet_core::pmcmc::EstimatorChoice;
use dupnet_core::rng::{derive_seed, tag};
use dupnet_core::{Component, Graph, Theta};
use rayon::prelude::*;

use super::estimate;
use crate::error::CliResult;

/// A likelihood curve over one component.
#[derive(Debug, Clone)]
pub struct SweepParams {
    pub choice: EstimatorChoice,
    pub base: Theta,
    pub component: Component,
    pub grid: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub theta: Theta,
    /// One estimate per repetition; `seconds` holds each run's wall clock.
    pub estimates: Vec<LikelihoodEstimate>,
}

/// Repetition `r` at every grid point uses the seed derived from
/// `(seed, r)`, so curves share random numbers across the grid.
pub fn likelihood_sweep(g: &Graph, params: &SweepParams) -> CliResult<Vec<SweepPoint>> {
    let thetas: Vec<Theta> = params
        .grid
        .iter()
        .map(|&x| params.base.with(params.component, x))
        .collect::<Result<_, _>>()?;
    let reps = if matches!(params.choice, EstimatorChoice::Exact) {
        1
    } else {
        params.reps
    };
    let jobs: Vec<(usize, usize)> = (0..thetas.len()).flat_map(|j| (0..reps).map(move |r| (j, r))).collect();
    let results: Vec<LikelihoodEstimate> = jobs
        .par_iter()
        .map(|&(j, r)| {
            let start = Instant::now();
            let seed = derive_seed(params.seed, tag::REPETITION, r as u64);
            let mut e = estimate(g, &params.choice, &thetas[j], seed)?;
            e.seconds = start.elapsed().as_secs_f64();
            Ok(e)
        })
        .collect::<CliResult<_>>()?;
    let mut it = results.into_iter();
    Ok(thetas
        .iter()
        .zip(&params.grid)
        .map(|(t, &value)| {
            let mut estimates: Vec<LikelihoodEstimate> = it.by_ref().take(reps).collect();
            if reps == 1 && params.reps > 1 {
                let first = estimates[0].clone();
                estimates.resize(params.reps, first);
            }
            SweepPoint {
                value,
                theta: *t,
                estimates,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use dupnet_core::pmcmc::Driving;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn params(choice: EstimatorChoice) -> SweepParams {
        SweepParams {
            choice,
            base: Theta::new(1.0, 0.5, 0.5, 0.0).unwrap(),
            component: Component::P,
            grid: vec![0.2, 0.6],
            reps: 3,
            seed: 9,
        }
    }

    #[test]
    fn exact_is_replicated_across_reps() {
        let points = likelihood_sweep(&triangle(), &params(EstimatorChoice::Exact)).unwrap();
        assert_eq!(points.len(), 2);
        for p in &points {
            assert_eq!(p.estimates.len(), 3);
            assert_eq!(p.theta.p(), p.value);
            assert!(p.estimates.iter().all(|e| e.log_value == p.estimates[0].log_value));
        }
    }

    #[test]
    fn reps_share_seeds_across_the_grid() {
        let choice = EstimatorChoice::Is {
            particles: 20,
            driving: Driving::Uniform,
        };
        let a = likelihood_sweep(&triangle(), &params(choice)).unwrap();
        let b = likelihood_sweep(&triangle(), &params(choice)).unwrap();
        for (pa, pb) in a.iter().zip(&b) {
            let la: Vec<f64> = pa.estimates.iter().map(|e| e.log_value).collect();
            let lb: Vec<f64> = pb.estimates.iter().map(|e| e.log_value).collect();
            assert_eq!(la, lb);
        }
    }
}
