//! Likelihood estimation and parameter inference for duplication-attachment
//! (DA) random graph models.
//!
//! A DA graph grows one vertex at a time: a uniformly chosen vertex is copied
//! and the copy either inherits each of its links independently (rule 1) or
//! merely attaches to it (rule 2). The likelihood of an observed graph is a
//! sum over all orders in which its vertices could have been added, which is
//! computed here in several ways:
//!
//! - [`exact`]: memoized recursion over induced subgraphs (up to 64 vertices),
//!   an ordering-enumeration oracle, and exact posterior utilities.
//! - [`estimators`]: importance sampling, sequential Monte Carlo with dynamic
//!   resampling, a discrete particle filter over reduced graphs, and an
//!   SMC-then-DPF combination. All are unbiased for any particle count.
//! - [`pmcmc`]: particle-marginal Metropolis-Hastings over the parameters.
//!
//! The crate is `no_std` and only needs `alloc`. Enable `std` for
//! `std::error::Error` and `parallel` for rayon-driven particle propagation;
//! results are identical with or without it.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg_attr(test, macro_use)]
extern crate alloc;

mod bitset;
mod error;
mod graph;
pub mod math;
pub mod rng;
mod simulate;
mod theta;
mod transition;

pub mod estimators;
pub mod exact;
pub mod pmcmc;

pub use bitset::VertexSet;
pub use error::{Error, Result};
pub use graph::{CandidateParents, Graph};
pub use simulate::{simulate_da, RemovalPath};
pub use theta::{Component, Theta};
pub use transition::{transition_weight, LogTheta, TransitionWeight};
