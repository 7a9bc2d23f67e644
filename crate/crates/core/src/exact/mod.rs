//! Exact likelihood and exact posterior computations for small graphs.

mod memo;
mod oracle;
mod posterior;

pub use memo::{exact_likelihood, ExactLikelihood, ExactSolver, MemoTable, TerminalInfo, EXACT_LIMIT};
pub use oracle::{brute_force_likelihood, brute_force_likelihoods, forward_step_distribution, BRUTE_FORCE_LIMIT};
pub use posterior::{
    exact_posterior_grid, rejection_sample_posterior, rejection_sample_with, uniform_grid, PosteriorTable,
    RejectionSamples, ENVELOPE_GRID_POINTS, ENVELOPE_MARGIN,
};
