use std::path::{Path, PathBuf};

use clap::Args;
use dupnet_core::math::{exp, log_mean_exp};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{CommandSettings, CommonSettings, Context, EstimatorSettings, GraphSettings};
use crate::error::{CliError, CliResult};
use crate::experiments::{likelihood_sweep, SweepParams};
use crate::output::num;
use crate::settings::{parse_component, parse_grid, parse_theta};
use crate::stats::{mean, sample_sd};

/// Likelihood curve over one parameter component, with repetitions.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct LikelihoodSettings {
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
    /// Parameters `pi,p,q,r`; the swept component is overridden by the grid.
    #[arg(long)]
    pub theta: Option<String>,
    /// Component to sweep: pi, p, q or r.
    #[arg(long)]
    pub component: Option<String>,
    /// Grid as `lo:hi:points` or a comma-separated list.
    #[arg(long)]
    pub grid: Option<String>,
    /// Repetitions per grid point.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Write per-step ESS and unique-particle traces.
    #[arg(long)]
    pub traces: Option<bool>,
}

impl CommandSettings for LikelihoodSettings {
    const NAME: &'static str = "likelihood";

    fn common(&self) -> &CommonSettings {
        &self.common
    }

    fn config_path(&self) -> Option<&Path> {
        self.config.as_deref()
    }

    fn resolve(mut self) -> CliResult<Self> {
        self.common.resolve();
        self.input.resolve(self.common.seed.unwrap_or(1))?;
        self.estimator.resolve("smc", 1000)?;
        parse_theta(self.theta.get_or_insert_with(|| "1,0.66,0.33,0".into()))?;
        parse_component(self.component.get_or_insert_with(|| "p".into()))?;
        parse_grid(self.grid.get_or_insert_with(|| "0.05:0.85:9".into()))?;
        if *self.reps.get_or_insert(30) == 0 {
            return Err(CliError::Usage("repetitions must be at least 1".into()));
        }
        self.traces.get_or_insert(true);
        Ok(self)
    }

    fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let g = self.input.load(ctx)?;
        let params = SweepParams {
            choice: self.estimator.choice()?,
            base: parse_theta(self.theta.as_deref().unwrap_or_default())?,
            component: parse_component(self.component.as_deref().unwrap_or_default())?,
            grid: parse_grid(self.grid.as_deref().unwrap_or_default())?,
            reps: self.reps.unwrap_or(1),
            seed: self.common.seed.unwrap_or(1),
        };
        let points = likelihood_sweep(&g, &params)?;
        ctx.out.write_csv(
            "estimates.csv",
            &["theta", "rep", "log_estimate", "estimate"],
            points.iter().flat_map(|p| {
                p.estimates
                    .iter()
                    .enumerate()
                    .map(move |(r, e)| vec![num(p.value), r.to_string(), num(e.log_value), num(e.value())])
            }),
        )?;
        ctx.out.write_csv(
            "summary.csv",
            &["theta", "mean", "sd", "lower", "upper", "log_mean"],
            points.iter().map(|p| {
                let values: Vec<f64> = p.estimates.iter().map(|e| e.value()).collect();
                let logs: Vec<f64> = p.estimates.iter().map(|e| e.log_value).collect();
                let m = mean(&values);
                let sd = sample_sd(&values);
                vec![
                    num(p.value),
                    num(m),
                    num(sd),
                    num(m - 2.0 * sd),
                    num(m + 2.0 * sd),
                    num(log_mean_exp(&logs)),
                ]
            }),
        )?;
        if self.traces.unwrap_or(true) && points.iter().any(|p| p.estimates.iter().any(|e| !e.trace.is_empty())) {
            ctx.out.write_csv(
                "diagnostics.csv",
                &["theta", "rep", "step", "ess", "unique", "resampled", "log_increment"],
                points.iter().flat_map(|p| {
                    p.estimates.iter().enumerate().flat_map(move |(r, e)| {
                        e.trace.iter().map(move |d| {
                            vec![
                                num(p.value),
                                r.to_string(),
                                d.step.to_string(),
                                num(d.ess),
                                d.unique.to_string(),
                                u8::from(d.resampled).to_string(),
                                num(d.log_increment),
                            ]
                        })
                    })
                }),
            )?;
        }
        for p in &points {
            let total: f64 = p.estimates.iter().map(|e| e.seconds).sum();
            ctx.timings.push(json!({
                "theta": p.value,
                "seconds_total": total,
                "seconds_per_estimate": total / p.estimates.len() as f64,
            }));
        }
        let best = points
            .iter()
            .map(|p| {
                (
                    p.value,
                    log_mean_exp(&p.estimates.iter().map(|e| e.log_value).collect::<Vec<_>>()),
                )
            })
            .fold((f64::NAN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        ctx.note("grid_points", points.len());
        ctx.note("max_mean_estimate_at", best.0);
        ctx.note("max_mean_estimate", exp(best.1));
        Ok(())
    }
}
