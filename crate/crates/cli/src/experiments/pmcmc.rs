use dupnet_core::exact::{
    exact_posterior_grid, rejection_sample_posterior, uniform_grid, PosteriorTable, RejectionSamples,
};
use dupnet_core::pmcmc::{acf, run_chain, ChainConfig, ChainTrace, PriorSpec};
use dupnet_core::rng::{derive_seed, tag};
use dupnet_core::{Component, Graph};

use crate::error::CliResult;

#[derive(Debug, Clone)]
pub struct PmcmcParams {
    pub prior: PriorSpec,
    pub chain: ChainConfig,
    pub max_lag: usize,
    /// Exact grid posterior with this many points and this many rejection
    /// draws, for a single free component.
    pub companion: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct Companion {
    pub table: PosteriorTable,
    pub rejection: RejectionSamples,
    /// KS distance of the kept chain samples to the grid posterior.
    pub chain_ks: f64,
    /// KS distance of the rejection draws to the grid posterior.
    pub rejection_ks: f64,
}

#[derive(Debug, Clone)]
pub struct PmcmcResult {
    pub trace: ChainTrace,
    /// Autocorrelations of each free component; `None` for a constant
    /// series.
    pub acf: Vec<(Component, Option<Vec<f64>>)>,
    pub companion: Option<Companion>,
}

pub fn pmcmc_run(g: &Graph, params: &PmcmcParams) -> CliResult<PmcmcResult> {
    let trace = run_chain(g, &params.prior, &params.chain)?;
    let acf = params
        .prior
        .free_components()
        .into_iter()
        .map(|c| {
            let series = trace.component_values(c);
            let lag = params.max_lag.min(series.len().saturating_sub(1));
            (c, acf(&series, lag).ok())
        })
        .collect();
    let companion = match params.companion {
        Some((points, draws)) => {
            let c = params.prior.single_free()?;
            let table = exact_posterior_grid(g, &params.prior, &uniform_grid(0.0, 1.0, points))?;
            let seed = derive_seed(params.chain.seed, tag::REJECTION, 0);
            let rejection = rejection_sample_posterior(g, &params.prior, draws, seed)?;
            Some(Companion {
                chain_ks: table.ks_distance(&trace.component_values(c)),
                rejection_ks: table.ks_distance(&rejection.draws),
                table,
                rejection,
            })
        }
        None => None,
    };
    Ok(PmcmcResult { trace, acf, companion })
}
