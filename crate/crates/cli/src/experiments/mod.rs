//! The experiments behind each subcommand, as plain functions returning
//! data. The command layer turns their results into files.

mod likelihood;
mod pmcmc;
mod relvar;

pub use likelihood::{likelihood_sweep, SweepParams, SweepPoint};
pub use pmcmc::{pmcmc_run, Companion, PmcmcParams, PmcmcResult};
pub use relvar::{relvar_table, RelvarParams, RelvarRow, RELVAR_METHODS};

use dupnet_core::estimators::{
    combo_estimate, dpf_estimate, is_estimate, smc_estimate, ComboConfig, LikelihoodEstimate, Method, SmcConfig,
};
use dupnet_core::exact::ExactSolver;
use dupnet_core::pmcmc::EstimatorChoice;
use dupnet_core::{Graph, Theta};

use crate::error::CliResult;

/// Runs one estimator and returns its full result, trace included.
pub fn estimate(g: &Graph, choice: &EstimatorChoice, theta: &Theta, seed: u64) -> CliResult<LikelihoodEstimate> {
    Ok(match *choice {
        EstimatorChoice::Exact => {
            let log_value = ExactSolver::new(g)?.evaluate(theta).log_value;
            LikelihoodEstimate {
                method: Method::Exact,
                log_value,
                segments: vec![log_value],
                resample_steps: Vec::new(),
                trace: Vec::new(),
                final_ess: None,
                collapsed: log_value == f64::NEG_INFINITY,
                seconds: 0.0,
            }
        }
        EstimatorChoice::Is { particles, driving } => is_estimate(g, theta, &driving.proposal(theta), particles, seed)?,
        EstimatorChoice::Smc {
            particles,
            driving,
            scheme,
            ess_fraction,
        } => {
            let cfg = SmcConfig::new(particles, driving.proposal(theta))
                .with_scheme(scheme)
                .with_ess_fraction(ess_fraction);
            smc_estimate(g, theta, &cfg, seed)?
        }
        EstimatorChoice::Dpf { particles } => dpf_estimate(g, theta, particles, seed)?,
        EstimatorChoice::Combo {
            particles,
            driving,
            switch_size,
            dpf_particles,
        } => {
            let cfg = ComboConfig::new(
                SmcConfig::new(particles, driving.proposal(theta)),
                switch_size,
                dpf_particles,
            );
            combo_estimate(g, theta, &cfg, seed)?
        }
    })
}
