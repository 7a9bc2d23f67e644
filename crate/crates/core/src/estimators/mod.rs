//! Monte Carlo likelihood estimators.
//!
//! All estimators walk the graph backwards, removing one vertex per step
//! until an irreducible graph is reached, and weight each removal by
//! `ω(G_k, v) / |G_k|` over its proposal probability. They differ in how the
//! population of partial removal paths is managed:
//!
//! - [`is_estimate`]: independent trajectories, no interaction.
//! - [`smc_estimate`]: resampling whenever the effective sample size falls
//!   below a fraction of the particle count.
//! - [`dpf_estimate`]: every removable vertex of every retained state is
//!   expanded deterministically; states are resampled only when the support
//!   exceeds the budget.
//! - [`combo_estimate`]: SMC down to a switch size, then one DPF per distinct
//!   reduced state.

mod combo;
mod diagnostics;
mod dpf;
mod estimate;
mod importance;
mod proposal;
mod resample;
mod smc;

pub use combo::{combo_estimate, ComboConfig, DEFAULT_MAX_STATES};
pub use diagnostics::{ess, ess_from_log_weights};
pub use dpf::{dpf_estimate, dpf_threshold_solve};
pub use estimate::{LikelihoodEstimate, Method, StepDiagnostics};
pub use importance::{is_estimate, is_reweight_curve, sample_trajectories, Trajectory};
pub use proposal::{proposal_probabilities, propose_vertex, ProposalKind};
pub use resample::{resample, ResampleScheme};
pub use smc::{smc_estimate, Particle, ParticleSystem, SmcConfig, DEFAULT_ESS_FRACTION};

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on.
/// Results are in index order either way.
pub(crate) fn map_indices<T, F>(n: usize, f: F) -> alloc::vec::Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Particle count `(t - t0)^3` below which the SMC relative variance bound
/// for uniform proposals no longer applies, for `steps = t - t0` removals.
pub fn suggested_particles(steps: usize) -> usize {
    steps.saturating_pow(3).max(1)
}
