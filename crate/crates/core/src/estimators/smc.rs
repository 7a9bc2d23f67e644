use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::{ln, log_mean_exp, log_sum_exp, normalize_log_weights};
use crate::rng::{stream, tag};
use crate::theta::Theta;
use crate::transition::{LogTheta, RemovalScan};

use super::diagnostics::{ess_from_log_weights, Lineage};
use super::estimate::{LikelihoodEstimate, Method, StepDiagnostics};
use super::proposal::{draw, Prepared, ProposalKind};
use super::resample::{resample, ResampleScheme};

/// Default ESS fraction below which particles are resampled.
pub const DEFAULT_ESS_FRACTION: f64 = 0.5;

/// SMC settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmcConfig {
    pub particles: usize,
    pub proposal: ProposalKind,
    pub scheme: ResampleScheme,
    /// Resample when `ESS < ess_fraction · particles`. Zero never
    /// resamples (plain IS); one or more resamples after every step.
    pub ess_fraction: f64,
}

impl SmcConfig {
    pub fn new(particles: usize, proposal: ProposalKind) -> Self {
        Self {
            particles,
            proposal,
            scheme: ResampleScheme::Stratified,
            ess_fraction: DEFAULT_ESS_FRACTION,
        }
    }

    pub fn with_scheme(mut self, scheme: ResampleScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_ess_fraction(mut self, fraction: f64) -> Self {
        self.ess_fraction = fraction;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.particles == 0 {
            return Err(Error::InvalidArgument("particle count must be positive".into()));
        }
        if self.ess_fraction.is_nan() || self.ess_fraction < 0.0 {
            return Err(Error::InvalidArgument("ESS fraction must be nonnegative".into()));
        }
        Ok(())
    }
}

/// One partial removal path.
#[derive(Debug, Clone)]
pub struct Particle {
    pub graph: Graph,
    pub path: Vec<usize>,
    pub log_weight: f64,
    scan: RemovalScan,
}

impl Particle {
    /// No vertex of the current graph is removable.
    pub fn is_terminal(&self) -> bool {
        self.scan.is_empty()
    }
}

/// Population of particles advanced one removal step at a time.
pub struct ParticleSystem {
    config: SmcConfig,
    seed: u64,
    target: LogTheta,
    prepared: Prepared,
    particles: Vec<Particle>,
    lineage: Lineage,
    step: usize,
    segments: Vec<f64>,
    resample_steps: Vec<usize>,
    trace: Vec<StepDiagnostics>,
    collapsed: bool,
}

impl ParticleSystem {
    pub fn new(g: &Graph, theta: &Theta, config: SmcConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let start = Particle {
            graph: g.clone(),
            path: Vec::new(),
            log_weight: 0.0,
            scan: RemovalScan::new(g),
        };
        Ok(Self {
            config,
            seed,
            target: LogTheta::new(theta),
            prepared: Prepared::new(&config.proposal),
            particles: alloc::vec![start; config.particles],
            lineage: Lineage::new(config.particles),
            step: 0,
            segments: Vec::new(),
            resample_steps: Vec::new(),
            trace: Vec::new(),
            collapsed: false,
        })
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn is_collapsed(&self) -> bool {
        self.collapsed
    }

    pub fn all_terminal(&self) -> bool {
        self.particles.iter().all(Particle::is_terminal)
    }

    pub fn trace(&self) -> &[StepDiagnostics] {
        &self.trace
    }

    fn log_weights(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.log_weight).collect()
    }

    /// Normalized current weights, `None` after a collapse.
    pub fn normalized_weights(&self) -> Option<Vec<f64>> {
        normalize_log_weights(&self.log_weights())
    }

    /// Log of the running estimate: closed segments times the current mean
    /// weight.
    pub fn log_estimate(&self) -> f64 {
        if self.collapsed {
            return f64::NEG_INFINITY;
        }
        self.segments.iter().sum::<f64>() + log_mean_exp(&self.log_weights())
    }

    pub(crate) fn closed_segments(&self) -> &[f64] {
        &self.segments
    }

    pub(crate) fn resample_steps(&self) -> &[usize] {
        &self.resample_steps
    }

    fn advance(&self, i: usize, p: &mut Particle) -> Option<usize> {
        if p.scan.is_empty() {
            return None;
        }
        let mut rng = stream(self.seed, i as u64, self.step as u64);
        let d = draw(&p.scan, &self.prepared, &mut rng);
        p.log_weight += p.scan.log_weight(d.index, &self.target) - ln(p.scan.n_active() as f64) - d.log_q;
        p.graph = p.graph.delete_vertex(d.vertex).expect("scanned vertex is active");
        p.path.push(d.vertex);
        p.scan.fill(&p.graph);
        Some(d.vertex)
    }

    /// Moves every particle one removal forward, then resamples if the ESS
    /// is low. Returns `false` without doing anything once every particle is
    /// terminal or the weights have collapsed.
    pub fn step(&mut self) -> bool {
        if self.collapsed || self.all_terminal() {
            return false;
        }
        let prev_total = log_sum_exp(&self.log_weights());
        let mut particles = core::mem::take(&mut self.particles);
        let moves: Vec<Option<usize>>;
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            let this = &*self;
            moves = particles
                .par_iter_mut()
                .enumerate()
                .map(|(i, p)| this.advance(i, p))
                .collect();
        }
        #[cfg(not(feature = "parallel"))]
        {
            moves = particles
                .iter_mut()
                .enumerate()
                .map(|(i, p)| self.advance(i, p))
                .collect();
        }
        self.particles = particles;
        let k = self.step;
        self.step += 1;
        let unique = self.lineage.advance(&moves);
        let log_w = self.log_weights();
        let total = log_sum_exp(&log_w);
        if total == f64::NEG_INFINITY {
            self.collapsed = true;
            self.trace.push(StepDiagnostics {
                step: k,
                ess: 0.0,
                unique,
                resampled: false,
                log_increment: f64::NEG_INFINITY,
            });
            return true;
        }
        let ess = ess_from_log_weights(&log_w).expect("weights are not all zero");
        let n = self.config.particles;
        let wanted = self.config.ess_fraction >= 1.0 || ess < self.config.ess_fraction * n as f64;
        let resampled = wanted && !self.all_terminal();
        if resampled {
            self.segments.push(log_mean_exp(&log_w));
            self.resample_steps.push(k);
            let weights = normalize_log_weights(&log_w).expect("weights are not all zero");
            let mut rng = stream(self.seed, tag::RESAMPLE, k as u64);
            let ancestors = resample(&weights, n, self.config.scheme, &mut rng);
            self.particles = ancestors
                .iter()
                .map(|&a| {
                    let mut p = self.particles[a].clone();
                    p.log_weight = 0.0;
                    p
                })
                .collect();
            self.lineage.resample(&ancestors);
        }
        self.trace.push(StepDiagnostics {
            step: k,
            ess,
            unique,
            resampled,
            log_increment: total - prev_total,
        });
        true
    }

    /// Steps until every particle is terminal or the weights collapse.
    pub fn run(&mut self) {
        while self.step() {}
    }

    /// Steps until every particle is terminal or satisfies `done`.
    pub fn run_until<F: Fn(&Particle) -> bool>(&mut self, done: F) {
        while !self.particles.iter().all(|p| p.is_terminal() || done(p)) && self.step() {}
    }

    pub(crate) fn finish_as(self, method: Method) -> LikelihoodEstimate {
        let mut e = if self.collapsed {
            LikelihoodEstimate::collapsed(method)
        } else {
            let log_w = self.log_weights();
            let mut segments = self.segments;
            segments.push(log_mean_exp(&log_w));
            let mut e = LikelihoodEstimate::from_segments(method, segments);
            e.final_ess = ess_from_log_weights(&log_w).ok();
            e
        };
        e.resample_steps = self.resample_steps;
        e.trace = self.trace;
        e
    }

    /// Closes the final segment and returns the estimate.
    pub fn finish(self) -> LikelihoodEstimate {
        self.finish_as(Method::Smc)
    }
}

/// SMC estimate of `L_θ(g)` with dynamic resampling.
///
/// The estimate is the product over inter-resampling segments of the mean
/// particle weight. Particle `i` draws step `k` from the stream
/// `(seed, i, k)`; resampling after step `k` uses `(seed, RESAMPLE, k)`.
pub fn smc_estimate(g: &Graph, theta: &Theta, config: &SmcConfig, seed: u64) -> Result<LikelihoodEstimate> {
    let mut system = ParticleSystem::new(g, theta, *config, seed)?;
    system.run();
    Ok(system.finish())
}
