//! Particle-marginal Metropolis-Hastings over the model parameters.
//!
//! Any unbiased likelihood estimator can drive the chain; the chain then
//! targets the exact posterior regardless of the particle count, though
//! noisier estimators mix more slowly. A particle count of roughly
//! `(t - t0)^3` for `t - t0` removal steps keeps the relative variance of the
//! SMC estimate bounded; see [`crate::estimators::suggested_particles`].

mod acf;
mod chain;
mod prior;
mod proposal;

pub use acf::acf;
pub use chain::{
    acceptance_log_ratio, pmmh_step, run_chain, run_chain_with, ChainConfig, ChainSample, ChainState, ChainTrace,
    Driving, EstimatorChoice, GraphEstimator, LogLikelihoodEstimator, DEFAULT_INIT_ATTEMPTS, DEFAULT_STEP_SIGMA,
};
pub use prior::{ComponentPrior, PriorSpec};
pub use proposal::{logit_jacobian_log_ratio, logit_rw_propose};
