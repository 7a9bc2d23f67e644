use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::{
    combo_estimate, dpf_estimate, is_estimate, smc_estimate, ComboConfig, ProposalKind, ResampleScheme, SmcConfig,
};
use crate::exact::ExactSolver;
use crate::graph::Graph;
use crate::math::ln;
use crate::rng::{derive_seed, stream, tag};
use crate::theta::Theta;

use super::prior::PriorSpec;
use super::proposal::logit_rw_propose;

/// Default logit-scale random walk standard deviation.
pub const DEFAULT_STEP_SIGMA: f64 = 0.5;
/// Prior draws tried before giving up on finding a positive likelihood.
pub const DEFAULT_INIT_ATTEMPTS: usize = 100;

/// Where the importance proposal of a sampling estimator is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Driving {
    /// Uniform over removable vertices.
    Uniform,
    /// Conditionally optimal at a fixed parameter.
    Fixed(Theta),
    /// Conditionally optimal at the parameter being evaluated.
    Target,
}

impl Driving {
    pub fn proposal(&self, target: &Theta) -> ProposalKind {
        match self {
            Driving::Uniform => ProposalKind::UniformRemovable,
            Driving::Fixed(t) => ProposalKind::OptimalConditional(*t),
            Driving::Target => ProposalKind::OptimalConditional(*target),
        }
    }
}

/// Likelihood estimator used inside the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorChoice {
    /// Exact recursion: the idealized marginal MCMC.
    Exact,
    Is {
        particles: usize,
        driving: Driving,
    },
    Smc {
        particles: usize,
        driving: Driving,
        scheme: ResampleScheme,
        ess_fraction: f64,
    },
    Dpf {
        particles: usize,
    },
    Combo {
        particles: usize,
        driving: Driving,
        switch_size: usize,
        dpf_particles: usize,
    },
}

/// Anything that returns an unbiased likelihood estimate, in log space,
/// for a parameter and a seed.
pub trait LogLikelihoodEstimator {
    fn log_likelihood(&mut self, theta: &Theta, seed: u64) -> Result<f64>;
}

impl<F> LogLikelihoodEstimator for F
where
    F: FnMut(&Theta, u64) -> Result<f64>,
{
    fn log_likelihood(&mut self, theta: &Theta, seed: u64) -> Result<f64> {
        self(theta, seed)
    }
}

/// One of the crate's estimators bound to a graph.
pub struct GraphEstimator {
    graph: Graph,
    choice: EstimatorChoice,
    solver: Option<ExactSolver>,
}

impl GraphEstimator {
    pub fn new(graph: &Graph, choice: EstimatorChoice) -> Result<Self> {
        let solver = match choice {
            EstimatorChoice::Exact => Some(ExactSolver::new(graph)?),
            _ => None,
        };
        Ok(Self {
            graph: graph.clone(),
            choice,
            solver,
        })
    }
}

impl LogLikelihoodEstimator for GraphEstimator {
    fn log_likelihood(&mut self, theta: &Theta, seed: u64) -> Result<f64> {
        let g = &self.graph;
        Ok(match self.choice {
            EstimatorChoice::Exact => {
                self.solver
                    .as_mut()
                    .expect("built with solver")
                    .evaluate(theta)
                    .log_value
            }
            EstimatorChoice::Is { particles, driving } => {
                is_estimate(g, theta, &driving.proposal(theta), particles, seed)?.log_value
            }
            EstimatorChoice::Smc {
                particles,
                driving,
                scheme,
                ess_fraction,
            } => {
                let cfg = SmcConfig::new(particles, driving.proposal(theta))
                    .with_scheme(scheme)
                    .with_ess_fraction(ess_fraction);
                smc_estimate(g, theta, &cfg, seed)?.log_value
            }
            EstimatorChoice::Dpf { particles } => dpf_estimate(g, theta, particles, seed)?.log_value,
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
                combo_estimate(g, theta, &cfg, seed)?.log_value
            }
        })
    }
}

/// Chain settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    /// States `θ^0 .. θ^{iterations-1}`, including the initial one.
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub step_sigma: f64,
    pub estimator: EstimatorChoice,
    pub seed: u64,
    /// Starting point; drawn from the prior when `None`.
    pub initial: Option<Theta>,
    pub init_attempts: usize,
}

impl ChainConfig {
    pub fn new(iterations: usize, estimator: EstimatorChoice, seed: u64) -> Self {
        Self {
            iterations,
            burn_in: 0,
            thin: 1,
            step_sigma: DEFAULT_STEP_SIGMA,
            estimator,
            seed,
            initial: None,
            init_attempts: DEFAULT_INIT_ATTEMPTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidArgument(alloc::format!(
                "burn-in ({}) must be smaller than the iteration count ({})",
                self.burn_in,
                self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidArgument("thinning must be at least 1".into()));
        }
        if !(self.step_sigma > 0.0 && self.step_sigma.is_finite()) {
            return Err(Error::InvalidArgument("step sigma must be positive".into()));
        }
        Ok(())
    }

    /// Whether the state at iteration `i` is kept in the trace.
    pub fn keeps(&self, i: usize) -> bool {
        i >= self.burn_in && (i - self.burn_in) % self.thin == 0
    }
}

/// Current chain position with its retained likelihood estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainState {
    pub theta: Theta,
    pub log_like: f64,
    pub log_prior: f64,
    pub iteration: usize,
}

/// One kept row of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSample {
    pub iter: usize,
    pub theta: Theta,
    pub log_like: f64,
    /// Whether the move into this iteration was accepted.
    pub accepted: bool,
}

/// Output of [`run_chain`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    pub samples: Vec<ChainSample>,
    pub iterations: usize,
    pub accepted: usize,
    pub proposals: usize,
    /// Prior draws used to initialize.
    pub init_attempts: usize,
    /// Estimator invocations, initialization included.
    pub estimator_calls: usize,
    /// Estimator invocations made while initializing.
    pub init_estimator_calls: usize,
    /// Wall-clock seconds; filled in by callers that time the run.
    pub seconds: f64,
}

impl ChainTrace {
    /// Accepted moves over `iterations - 1` proposals.
    pub fn acceptance_rate(&self) -> f64 {
        if self.iterations <= 1 {
            0.0
        } else {
            self.accepted as f64 / (self.iterations - 1) as f64
        }
    }

    pub fn component_values(&self, c: crate::theta::Component) -> Vec<f64> {
        self.samples.iter().map(|s| s.theta.get(c)).collect()
    }
}

/// `ln` of the pseudo-marginal acceptance ratio; `-inf` when the proposal
/// has zero estimated likelihood or zero prior density.
pub fn acceptance_log_ratio(
    log_like_new: f64,
    log_prior_new: f64,
    current: &ChainState,
    log_proposal_ratio: f64,
) -> f64 {
    if log_like_new == f64::NEG_INFINITY || log_prior_new == f64::NEG_INFINITY || log_like_new.is_nan() {
        return f64::NEG_INFINITY;
    }
    (log_like_new - current.log_like) + (log_prior_new - current.log_prior) + log_proposal_ratio
}

/// One PMMH transition: propose on the logit scale, estimate the likelihood
/// afresh at the proposal, and accept or keep the incumbent together with
/// its stored estimate.
///
/// Randomness comes from the streams `(seed, CHAIN, i)` and
/// `derive_seed(seed, ESTIMATE, i)` for the new iteration index `i`.
pub fn pmmh_step<E: LogLikelihoodEstimator + ?Sized>(
    state: &ChainState,
    estimator: &mut E,
    prior: &PriorSpec,
    step_sigma: f64,
    seed: u64,
) -> Result<(ChainState, bool)> {
    let i = state.iteration + 1;
    let mut rng = stream(seed, tag::CHAIN, i as u64);
    let (proposal, log_q) = logit_rw_propose(&state.theta, step_sigma, prior, &mut rng)?;
    let log_prior = prior.log_density(&proposal);
    let log_like = estimator.log_likelihood(&proposal, derive_seed(seed, tag::ESTIMATE, i as u64))?;
    let ratio = acceptance_log_ratio(log_like, log_prior, state, log_q);
    let u = 1.0 - rng.gen::<f64>();
    let accept = ratio >= 0.0 || ln(u) < ratio;
    let next = if accept {
        ChainState {
            theta: proposal,
            log_like,
            log_prior,
            iteration: i,
        }
    } else {
        ChainState { iteration: i, ..*state }
    };
    Ok((next, accept))
}

fn interior(prior: &PriorSpec, theta: &Theta) -> bool {
    prior
        .free_components()
        .iter()
        .all(|&c| theta.get(c) > 0.0 && theta.get(c) < 1.0)
}

/// Runs a PMMH chain with any estimator.
pub fn run_chain_with<E: LogLikelihoodEstimator + ?Sized>(
    estimator: &mut E,
    prior: &PriorSpec,
    config: &ChainConfig,
) -> Result<ChainTrace> {
    config.validate()?;
    let seed = config.seed;
    let init_seed = derive_seed(seed, tag::ESTIMATE, 0);
    let mut init_rng = stream(seed, tag::CHAIN, 0);
    let mut calls = 0;
    let mut attempts = 0;
    let mut state = None;
    while attempts < config.init_attempts.max(1) && state.is_none() {
        attempts += 1;
        let theta = match config.initial {
            Some(t) => t,
            None => prior.sample(&mut init_rng)?,
        };
        if !interior(prior, &theta) {
            if config.initial.is_some() {
                return Err(Error::Boundary(prior.free_components()[0]));
            }
            continue;
        }
        let log_prior = prior.log_density(&theta);
        calls += 1;
        let log_like = estimator.log_likelihood(&theta, derive_seed(init_seed, tag::CHAIN, attempts as u64))?;
        if log_like > f64::NEG_INFINITY && log_prior > f64::NEG_INFINITY {
            state = Some(ChainState {
                theta,
                log_like,
                log_prior,
                iteration: 0,
            });
        } else if config.initial.is_some() {
            break;
        }
    }
    let mut state = state.ok_or(Error::Initialization { attempts })?;
    let init_calls = calls;
    let mut samples = Vec::new();
    if config.keeps(0) {
        samples.push(ChainSample {
            iter: 0,
            theta: state.theta,
            log_like: state.log_like,
            accepted: true,
        });
    }
    let mut accepted = 0;
    for i in 1..config.iterations {
        let (next, acc) = pmmh_step(&state, estimator, prior, config.step_sigma, seed)?;
        calls += 1;
        accepted += usize::from(acc);
        state = next;
        if config.keeps(i) {
            samples.push(ChainSample {
                iter: i,
                theta: state.theta,
                log_like: state.log_like,
                accepted: acc,
            });
        }
    }
    Ok(ChainTrace {
        samples,
        iterations: config.iterations,
        accepted,
        proposals: config.iterations - 1,
        init_attempts: attempts,
        estimator_calls: calls,
        init_estimator_calls: init_calls,
        seconds: 0.0,
    })
}

/// Runs a PMMH chain on `graph` with the estimator named in `config`.
pub fn run_chain(graph: &Graph, prior: &PriorSpec, config: &ChainConfig) -> Result<ChainTrace> {
    let mut estimator = GraphEstimator::new(graph, config.estimator)?;
    run_chain_with(&mut estimator, prior, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_posterior_grid, uniform_grid};
    use crate::graph::fixtures::*;
    use crate::pmcmc::ComponentPrior;
    use crate::simulate_da;
    use crate::theta::Component;

    fn base() -> Theta {
        Theta::new(1.0, 0.66, 0.33, 0.0).unwrap()
    }

    fn prior() -> PriorSpec {
        PriorSpec::single(Component::P, ComponentPrior::Uniform01, &base()).unwrap()
    }

    fn state(log_like: f64) -> ChainState {
        ChainState {
            theta: base(),
            log_like,
            log_prior: 0.0,
            iteration: 0,
        }
    }

    #[test]
    fn acceptance_ratio_examples() {
        assert_eq!(acceptance_log_ratio(-3.0, 0.0, &state(-3.0), 0.0), 0.0);
        assert_eq!(
            acceptance_log_ratio(f64::NEG_INFINITY, 0.0, &state(-3.0), 0.0),
            f64::NEG_INFINITY
        );
        let r = acceptance_log_ratio(ln(0.02), 0.0, &state(ln(0.01)), 0.0);
        assert!((r - ln(2.0)).abs() < 1e-12);
        let shifted = acceptance_log_ratio(ln(0.02) + 50.0, 0.0, &state(ln(0.01) + 50.0), 0.0);
        assert!((r - shifted).abs() < 1e-12);
    }

    #[test]
    fn iteration_bookkeeping() {
        let mut cfg = ChainConfig::new(5000, EstimatorChoice::Exact, 1);
        cfg.burn_in = 500;
        cfg.thin = 5;
        let trace = run_chain(&path3(), &prior(), &cfg).unwrap();
        assert_eq!(trace.samples.len(), 900);
        assert_eq!(trace.samples[0].iter, 500);
        assert_eq!(trace.estimator_calls, trace.init_estimator_calls + trace.proposals);
        assert_eq!(trace.init_estimator_calls, 1);
        let rate = trace.acceptance_rate();
        assert!(rate > 0.0 && rate < 1.0);
    }

    #[test]
    fn incumbent_is_never_reestimated() {
        let mut calls = Vec::new();
        let mut est = |t: &Theta, seed: u64| -> Result<f64> {
            calls.push(seed);
            Ok(-(t.p() - 0.5).powi(2) * 10.0 + (seed % 7) as f64 * 0.1)
        };
        let cfg = ChainConfig::new(200, EstimatorChoice::Exact, 3);
        let trace = run_chain_with(&mut est, &prior(), &cfg).unwrap();
        assert_eq!(calls.len(), 200);
        let mut prev = trace.samples[0];
        for s in &trace.samples[1..] {
            if !s.accepted {
                assert_eq!(s.theta, prev.theta);
                assert_eq!(s.log_like.to_bits(), prev.log_like.to_bits());
            }
            prev = *s;
        }
    }

    #[test]
    fn invalid_configs() {
        let cfg = ChainConfig::new(0, EstimatorChoice::Exact, 0);
        assert!(run_chain(&k3(), &prior(), &cfg).is_err());
        let mut cfg = ChainConfig::new(10, EstimatorChoice::Exact, 0);
        cfg.thin = 0;
        assert!(run_chain(&k3(), &prior(), &cfg).is_err());
    }

    #[test]
    fn initialization_failure() {
        let base = Theta::new(1.0, 0.5, 1.0, 0.0).unwrap();
        let prior = PriorSpec::single(Component::P, ComponentPrior::Uniform01, &base).unwrap();
        let cfg = ChainConfig::new(10, EstimatorChoice::Exact, 0);
        assert_eq!(
            run_chain(&Graph::empty(2), &prior, &cfg),
            Err(Error::Initialization { attempts: 100 })
        );
    }

    #[test]
    fn deterministic() {
        let g = simulate_da(&Graph::empty(1), &base(), 7, 2).unwrap().0;
        let est = EstimatorChoice::Smc {
            particles: 20,
            driving: Driving::Uniform,
            scheme: ResampleScheme::Stratified,
            ess_fraction: 0.5,
        };
        let cfg = ChainConfig::new(300, est, 9);
        assert_eq!(
            run_chain(&g, &prior(), &cfg).unwrap(),
            run_chain(&g, &prior(), &cfg).unwrap()
        );
    }

    #[test]
    fn exact_chain_matches_grid_posterior() {
        let g = simulate_da(&Graph::empty(1), &base(), 7, 2).unwrap().0;
        let mut cfg = ChainConfig::new(40_000, EstimatorChoice::Exact, 4);
        cfg.burn_in = 1000;
        let trace = run_chain(&g, &prior(), &cfg).unwrap();
        let table = exact_posterior_grid(&g, &prior(), &uniform_grid(0.0, 1.0, 2001)).unwrap();
        let ks = table.ks_distance(&trace.component_values(Component::P));
        assert!(ks < 0.05, "ks = {ks}");
    }
}
