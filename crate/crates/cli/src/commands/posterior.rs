use std::path::{Path, PathBuf};

use clap::Args;
use dupnet_core::exact::{exact_posterior_grid, rejection_sample_posterior, PosteriorTable, RejectionSamples};
use dupnet_core::rng::{derive_seed, tag};
use serde::{Deserialize, Serialize};

use super::{CommandSettings, CommonSettings, Context, GraphSettings};
use crate::error::{CliError, CliResult};
use crate::output::num;
use crate::settings::{build_prior, parse_component, parse_component_prior, parse_grid, parse_theta};

/// Exact grid posterior of one component, with rejection draws.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PosteriorSettings {
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
    /// Values of the fixed components, `pi,p,q,r`.
    #[arg(long)]
    pub theta: Option<String>,
    /// The free component.
    #[arg(long)]
    pub free: Option<String>,
    /// `uniform` or `beta:a,b`.
    #[arg(long)]
    pub prior: Option<String>,
    /// Grid as `lo:hi:points` or a comma-separated list.
    #[arg(long)]
    pub grid: Option<String>,
    /// Rejection draws; 0 skips the sampler.
    #[arg(long)]
    pub rejection_draws: Option<usize>,
}

impl CommandSettings for PosteriorSettings {
    const NAME: &'static str = "posterior-exact";

    fn common(&self) -> &CommonSettings {
        &self.common
    }

    fn config_path(&self) -> Option<&Path> {
        self.config.as_deref()
    }

    fn resolve(mut self) -> CliResult<Self> {
        self.common.resolve();
        self.input.resolve(self.common.seed.unwrap_or(1))?;
        parse_theta(self.theta.get_or_insert_with(|| "1,0.66,0.33,0".into()))?;
        parse_component(self.free.get_or_insert_with(|| "p".into()))?;
        parse_component_prior(self.prior.get_or_insert_with(|| "uniform".into()))?;
        if parse_grid(self.grid.get_or_insert_with(|| "0:1:1001".into()))?.len() < 2 {
            return Err(CliError::Usage("the posterior grid needs at least two points".into()));
        }
        self.rejection_draws.get_or_insert(10_000);
        Ok(self)
    }

    fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let g = self.input.load(ctx)?;
        let base = parse_theta(self.theta.as_deref().unwrap_or_default())?;
        let free = parse_component(self.free.as_deref().unwrap_or("p"))?;
        let prior = build_prior(&base, &[free], self.prior.as_deref().unwrap_or("uniform"))?;
        let grid = parse_grid(self.grid.as_deref().unwrap_or_default())?;
        let table = exact_posterior_grid(&g, &prior, &grid)?;
        let draws = self.rejection_draws.unwrap_or(0);
        let seed = derive_seed(self.common.seed.unwrap_or(1), tag::REJECTION, 0);
        let rejection = rejection_sample_posterior(&g, &prior, draws, seed)?;
        write_companion(ctx, &table, &rejection)?;
        ctx.note("mode", table.mode());
        ctx.note("rejection_acceptance", rejection.acceptance_rate());
        ctx.note("rejection_ks", table.ks_distance(&rejection.draws));
        if rejection.envelope_violations > 0 {
            ctx.warn(format!(
                "rejection envelope was exceeded at {} proposals",
                rejection.envelope_violations
            ));
        }
        Ok(())
    }
}

pub(crate) fn write_companion(
    ctx: &mut Context,
    table: &PosteriorTable,
    rejection: &RejectionSamples,
) -> CliResult<()> {
    ctx.out.write_csv(
        "posterior.csv",
        &["theta", "log_post", "mass"],
        table
            .theta()
            .iter()
            .zip(table.log_post())
            .zip(table.mass())
            .map(|((&t, &lp), &m)| vec![num(t), num(lp), num(m)]),
    )?;
    ctx.out.write_csv(
        "rejection.csv",
        &["draw", "value"],
        rejection
            .draws
            .iter()
            .enumerate()
            .map(|(i, &v)| vec![i.to_string(), num(v)]),
    )
}
