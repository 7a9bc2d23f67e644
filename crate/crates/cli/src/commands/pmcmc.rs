use std::path::{Path, PathBuf};

use clap::Args;
use dupnet_core::pmcmc::{ChainConfig, DEFAULT_STEP_SIGMA};
use dupnet_core::Component;
use serde::{Deserialize, Serialize};

use super::posterior::write_companion;
use super::{CommandSettings, CommonSettings, Context, EstimatorSettings, GraphSettings};
use crate::error::{CliError, CliResult};
use crate::experiments::{pmcmc_run, PmcmcParams};
use crate::output::num;
use crate::settings::{build_prior, parse_component_prior, parse_components, parse_theta};
use crate::stats::histogram;

/// Particle marginal Metropolis-Hastings over the free parameters.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PmcmcSettings {
    /// Flat JSON file of settings; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonSettings,
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphSettings,
    #[command(flatten)]
    #[serde(flatten)]
    pub estimator: EstimatorSettings,
    /// Values of the fixed components, `pi,p,q,r`.
    #[arg(long)]
    pub theta: Option<String>,
    /// Free components, comma-separated.
    #[arg(long)]
    pub free: Option<String>,
    /// Prior of each free component: `uniform` or `beta:a,b`.
    #[arg(long)]
    pub prior: Option<String>,
    /// Starting point `pi,p,q,r` [default: a prior draw].
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Standard deviation of the logit-scale random walk.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub max_lag: Option<usize>,
    /// Histogram bins on [0, 1].
    #[arg(long)]
    pub bins: Option<usize>,
    /// Also compute the exact grid posterior and rejection draws.
    #[arg(long)]
    pub companion: Option<bool>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub rejection_draws: Option<usize>,
}

impl PmcmcSettings {
    fn chain_config(&self) -> CliResult<ChainConfig> {
        let mut config = ChainConfig::new(
            self.iterations.unwrap_or(5000),
            self.estimator.choice()?,
            self.common.seed.unwrap_or(1),
        );
        config.burn_in = self.burn_in.unwrap_or(500);
        config.thin = self.thin.unwrap_or(1);
        config.step_sigma = self.sigma.unwrap_or(DEFAULT_STEP_SIGMA);
        config.initial = self.initial.as_deref().map(parse_theta).transpose()?;
        config.validate()?;
        Ok(config)
    }

    fn free_components(&self) -> CliResult<Vec<Component>> {
        parse_components(self.free.as_deref().unwrap_or("p"))
    }
}

impl CommandSettings for PmcmcSettings {
    const NAME: &'static str = "pmcmc";

    fn common(&self) -> &CommonSettings {
        &self.common
    }

    fn config_path(&self) -> Option<&Path> {
        self.config.as_deref()
    }

    fn resolve(mut self) -> CliResult<Self> {
        self.common.resolve();
        self.input.resolve(self.common.seed.unwrap_or(1))?;
        self.estimator.resolve("smc", 100)?;
        parse_theta(self.theta.get_or_insert_with(|| "1,0.66,0.33,0".into()))?;
        parse_components(self.free.get_or_insert_with(|| "p".into()))?;
        parse_component_prior(self.prior.get_or_insert_with(|| "uniform".into()))?;
        self.iterations.get_or_insert(5000);
        self.burn_in.get_or_insert(500);
        self.thin.get_or_insert(1);
        self.sigma.get_or_insert(DEFAULT_STEP_SIGMA);
        self.max_lag.get_or_insert(50);
        if *self.bins.get_or_insert(50) == 0 {
            return Err(CliError::Usage("bins must be positive".into()));
        }
        let companion = *self.companion.get_or_insert(false);
        self.grid_points.get_or_insert(1001);
        self.rejection_draws.get_or_insert(10_000);
        if companion && self.free_components()?.len() != 1 {
            return Err(CliError::Usage(
                "the exact companion needs exactly one free component".into(),
            ));
        }
        self.chain_config()?;
        Ok(self)
    }

    fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let g = self.input.load(ctx)?;
        let base = parse_theta(self.theta.as_deref().unwrap_or_default())?;
        let free = self.free_components()?;
        let params = PmcmcParams {
            prior: build_prior(&base, &free, self.prior.as_deref().unwrap_or("uniform"))?,
            chain: self.chain_config()?,
            max_lag: self.max_lag.unwrap_or(50),
            companion: self
                .companion
                .unwrap_or(false)
                .then(|| (self.grid_points.unwrap_or(1001), self.rejection_draws.unwrap_or(10_000))),
        };
        let result = pmcmc_run(&g, &params)?;
        let trace = &result.trace;
        ctx.out.write_csv(
            "chain.csv",
            &[
                "iter", "theta_pi", "theta_p", "theta_q", "theta_r", "log_like", "accepted",
            ],
            trace.samples.iter().map(|s| {
                let mut row = vec![s.iter.to_string()];
                row.extend(s.theta.values().iter().map(|&v| num(v)));
                row.push(num(s.log_like));
                row.push(u8::from(s.accepted).to_string());
                row
            }),
        )?;

        let lags = result
            .acf
            .iter()
            .filter_map(|(_, a)| a.as_ref().map(Vec::len))
            .max()
            .unwrap_or(0);
        let names: Vec<String> = result.acf.iter().map(|(c, _)| c.name().to_string()).collect();
        let mut header = vec!["lag"];
        header.extend(names.iter().map(String::as_str));
        ctx.out.write_csv(
            "acf.csv",
            &header,
            (0..lags).map(|k| {
                let mut row = vec![k.to_string()];
                row.extend(result.acf.iter().map(|(_, a)| match a {
                    Some(a) if k < a.len() => num(a[k]),
                    _ => num(f64::NAN),
                }));
                row
            }),
        )?;
        for (c, a) in &result.acf {
            if a.is_none() {
                ctx.warn(format!(
                    "chain for {} is constant; its autocorrelation is undefined",
                    c.name()
                ));
            }
        }

        let bins = self.bins.unwrap_or(50);
        ctx.out.write_csv(
            "histogram.csv",
            &["component", "bin_lo", "bin_hi", "count", "density"],
            free.iter().flat_map(|&c| {
                histogram(&trace.component_values(c), 0.0, 1.0, bins)
                    .into_iter()
                    .map(move |(lo, hi, n, d)| vec![c.name().to_string(), num(lo), num(hi), n.to_string(), num(d)])
            }),
        )?;

        if let Some(companion) = &result.companion {
            write_companion(ctx, &companion.table, &companion.rejection)?;
            ctx.note("chain_ks", companion.chain_ks);
            ctx.note("rejection_ks", companion.rejection_ks);
        }
        ctx.note("kept_samples", trace.samples.len());
        ctx.note("acceptance_rate", trace.acceptance_rate());
        ctx.note("estimator_calls", trace.estimator_calls);
        ctx.note("init_attempts", trace.init_attempts);
        ctx.timings.push(serde_json::json!({
            "stage": "chain",
            "seconds": trace.seconds,
            "seconds_per_iteration": trace.seconds / trace.iterations.max(1) as f64,
        }));
        Ok(())
    }
}
