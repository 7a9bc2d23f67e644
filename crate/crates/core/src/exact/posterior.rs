use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::ExactSolver;
use crate::graph::Graph;
use crate::math::{exp, ln};
use crate::pmcmc::PriorSpec;
use crate::rng::{stream, tag};
use crate::theta::{Component, Theta};

/// Points in the envelope search grid for rejection sampling.
pub const ENVELOPE_GRID_POINTS: usize = 1024;
/// Multiplier on the grid maximum of `L · prior` used as envelope.
pub const ENVELOPE_MARGIN: f64 = 1.1;

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let h = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { hi } else { lo + h * i as f64 })
                .collect()
        }
    }
}

/// Posterior of one free component tabulated on a grid and normalized with
/// the trapezoid rule.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorTable {
    component: Component,
    theta: Vec<f64>,
    log_post: Vec<f64>,
    density: Vec<f64>,
    mass: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PosteriorTable {
    /// Normalizes unnormalized log posterior values on a strictly
    /// increasing grid.
    pub fn from_log_posterior(component: Component, grid: &[f64], log_post: &[f64]) -> Result<Self> {
        if grid.is_empty() || grid.len() != log_post.len() {
            return Err(Error::InvalidArgument(
                "grid must be nonempty and match the posterior values".into(),
            ));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
        }
        if log_post.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidArgument(
                "posterior is unbounded or undefined on the grid".into(),
            ));
        }
        let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::DegeneratePosterior);
        }
        let n = grid.len();
        let raw: Vec<f64> = log_post.iter().map(|v| exp(v - max)).collect();
        let weights: Vec<f64> = if n == 1 {
            alloc::vec![1.0]
        } else {
            (0..n)
                .map(|i| {
                    let lo = grid[i.saturating_sub(1)];
                    let hi = grid[(i + 1).min(n - 1)];
                    (hi - lo) / 2.0
                })
                .collect()
        };
        let z: f64 = raw.iter().zip(&weights).map(|(d, w)| d * w).sum();
        let density: Vec<f64> = raw.iter().map(|d| d / z).collect();
        let mass: Vec<f64> = density.iter().zip(&weights).map(|(d, w)| d * w).collect();
        let mut cumulative = alloc::vec![0.0; n];
        for i in 1..n {
            cumulative[i] = cumulative[i - 1] + (density[i - 1] + density[i]) * (grid[i] - grid[i - 1]) / 2.0;
        }
        Ok(Self {
            component,
            theta: grid.to_vec(),
            log_post: log_post.to_vec(),
            density,
            mass,
            cumulative,
        })
    }

    pub fn component(&self) -> Component {
        self.component
    }
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
    pub fn log_post(&self) -> &[f64] {
        &self.log_post
    }
    pub fn density(&self) -> &[f64] {
        &self.density
    }
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Grid point of highest posterior.
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (i, v) in self.log_post.iter().enumerate() {
            if *v > self.log_post[best] {
                best = i;
            }
        }
        self.theta[best]
    }

    /// CDF of the piecewise-linear density through the grid values.
    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.theta.len();
        if n == 1 {
            return if x >= self.theta[0] { 1.0 } else { 0.0 };
        }
        if x <= self.theta[0] {
            return 0.0;
        }
        if x >= self.theta[n - 1] {
            return 1.0;
        }
        let i = self.theta.partition_point(|&t| t <= x) - 1;
        let h = self.theta[i + 1] - self.theta[i];
        let dx = x - self.theta[i];
        let slope = (self.density[i + 1] - self.density[i]) / h;
        let area = dx * (2.0 * self.density[i] + slope * dx) / 2.0;
        (self.cumulative[i] + area).min(1.0)
    }

    /// Kolmogorov-Smirnov distance between the empirical CDF of `samples`
    /// and this table's CDF.
    pub fn ks_distance(&self, samples: &[f64]) -> f64 {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut worst: f64 = 0.0;
        for (i, &x) in sorted.iter().enumerate() {
            let f = self.cdf(x);
            worst = worst.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
        }
        worst
    }
}

/// Exact posterior of the single free component of `prior` on `grid`.
pub fn exact_posterior_grid(g: &Graph, prior: &PriorSpec, grid: &[f64]) -> Result<PosteriorTable> {
    let component = prior.single_free()?;
    let mut solver = ExactSolver::new(g)?;
    let mut log_post = Vec::with_capacity(grid.len());
    for &x in grid {
        let theta = prior.theta_at(component, x)?;
        log_post.push(solver.evaluate(&theta).log_value + prior.log_density(&theta));
    }
    PosteriorTable::from_log_posterior(component, grid, &log_post)
}

/// Independent posterior draws of the free component.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionSamples {
    pub draws: Vec<f64>,
    /// Proposals made in total.
    pub proposals: usize,
    /// Log of the envelope constant.
    pub log_envelope: f64,
    /// Proposals at which `L · prior` exceeded the envelope.
    pub envelope_violations: usize,
}

impl RejectionSamples {
    pub fn acceptance_rate(&self) -> f64 {
        self.draws.len() as f64 / self.proposals as f64
    }
}

/// Rejection sampler for a single free component with a user-supplied log
/// likelihood.
///
/// Proposes uniformly on [0, 1] and accepts with probability
/// `L · prior / M`, where `M` is [`ENVELOPE_MARGIN`] times the maximum of
/// `L · prior` over [`ENVELOPE_GRID_POINTS`] grid points.
pub fn rejection_sample_with<F>(
    mut log_likelihood: F,
    prior: &PriorSpec,
    count: usize,
    rng_seed: u64,
) -> Result<RejectionSamples>
where
    F: FnMut(&Theta) -> Result<f64>,
{
    let component = prior.single_free()?;
    let mut log_target = |x: f64| -> Result<f64> {
        let theta = prior.theta_at(component, x)?;
        let lp = prior.log_density(&theta);
        if lp == f64::NEG_INFINITY {
            return Ok(lp);
        }
        Ok(log_likelihood(&theta)? + lp)
    };
    let mut grid_max = f64::NEG_INFINITY;
    for x in uniform_grid(0.0, 1.0, ENVELOPE_GRID_POINTS) {
        let v = log_target(x)?;
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::InvalidArgument(format!(
                "target density is unbounded at {component} = {x}"
            )));
        }
        grid_max = grid_max.max(v);
    }
    if grid_max == f64::NEG_INFINITY {
        return Err(Error::DegeneratePosterior);
    }
    let log_envelope = grid_max + ln(ENVELOPE_MARGIN);
    let mut rng = stream(rng_seed, tag::REJECTION, 0);
    let mut draws = Vec::with_capacity(count);
    let mut proposals = 0;
    let mut envelope_violations = 0;
    while draws.len() < count {
        proposals += 1;
        let x: f64 = rng.gen();
        let u: f64 = rng.gen();
        let log_ratio = log_target(x)? - log_envelope;
        if log_ratio > 0.0 {
            envelope_violations += 1;
        }
        if ln(u) < log_ratio {
            draws.push(x);
        }
    }
    Ok(RejectionSamples {
        draws,
        proposals,
        log_envelope,
        envelope_violations,
    })
}

/// Exact posterior draws for the single free component, using the exact
/// likelihood of `g`.
pub fn rejection_sample_posterior(
    g: &Graph,
    prior: &PriorSpec,
    count: usize,
    rng_seed: u64,
) -> Result<RejectionSamples> {
    let mut solver = ExactSolver::new(g)?;
    rejection_sample_with(|t| Ok(solver.evaluate(t).log_value), prior, count, rng_seed)
}
