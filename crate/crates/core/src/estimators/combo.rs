use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::{exp, ln, log_mean_exp, LogSum};
use crate::rng::{derive_seed, stream, tag};
use crate::theta::Theta;

use super::dpf::{dpf_estimate, threshold_resample, Support};
use super::estimate::{LikelihoodEstimate, Method};
use super::smc::{ParticleSystem, SmcConfig};

/// Default cap on the number of distinct states handed to the DPF stage.
pub const DEFAULT_MAX_STATES: usize = 32;

/// Settings for SMC down to `switch_size` vertices followed by the DPF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComboConfig {
    pub smc: SmcConfig,
    pub switch_size: usize,
    pub dpf_particles: usize,
    /// At most this many distinct SMC end states get their own DPF run.
    pub max_states: usize,
}

impl ComboConfig {
    pub fn new(smc: SmcConfig, switch_size: usize, dpf_particles: usize) -> Self {
        Self {
            smc,
            switch_size,
            dpf_particles,
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

/// SMC until every particle has at most `switch_size` vertices, then a DPF
/// on each distinct reduced state.
///
/// The estimate is the SMC running estimate times `Σ_j w̄_j L̂_DPF(G_j)`,
/// where `w̄_j` is the normalized weight of the particles sitting at state
/// `G_j`. More than `max_states` states are first thinned with the DPF's
/// unbiased threshold resampling. A switch size at or above `|g|` runs the
/// DPF alone with `seed`.
pub fn combo_estimate(g: &Graph, theta: &Theta, config: &ComboConfig, seed: u64) -> Result<LikelihoodEstimate> {
    if config.max_states == 0 {
        return Err(Error::InvalidArgument("state cap must be positive".into()));
    }
    if config.switch_size >= g.active_count() {
        let mut e = dpf_estimate(g, theta, config.dpf_particles, seed)?;
        e.method = Method::Combo;
        return Ok(e);
    }
    let switch = config.switch_size;
    let mut system = ParticleSystem::new(g, theta, config.smc, seed)?;
    system.run_until(|p| p.graph.active_count() <= switch);
    if system.is_collapsed() || system.all_terminal() {
        return Ok(system.finish_as(Method::Combo));
    }
    let weights = system.normalized_weights().expect("not collapsed");
    let mut support = Support::default();
    for (p, &w) in system.particles().iter().zip(&weights) {
        if w > 0.0 {
            support.add(p.graph.clone(), ln(w));
        }
    }
    let entries = support.into_entries();
    let mass: Vec<f64> = entries.iter().map(|e| exp(e.1)).collect();
    let (chosen, _) = threshold_resample(&mass, config.max_states, &mut stream(seed, tag::COMBO, 0))?;
    let mut tail = LogSum::new();
    for (j, (i, log_w)) in chosen.into_iter().enumerate() {
        let sub_seed = derive_seed(seed, tag::COMBO, j as u64 + 1);
        let sub = dpf_estimate(&entries[i].0, theta, config.dpf_particles, sub_seed)?;
        tail.add(log_w + sub.log_value);
    }
    let log_w: Vec<f64> = system.particles().iter().map(|p| p.log_weight).collect();
    let mut segments = system.closed_segments().to_vec();
    segments.push(log_mean_exp(&log_w));
    segments.push(tail.value());
    let resample_steps = system.resample_steps().to_vec();
    let trace = system.trace().to_vec();
    let mut e = LikelihoodEstimate::from_segments(Method::Combo, segments);
    e.collapsed = e.log_value == f64::NEG_INFINITY;
    e.resample_steps = resample_steps;
    e.trace = trace;
    Ok(e)
}
