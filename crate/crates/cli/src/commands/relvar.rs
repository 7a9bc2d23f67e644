use std::path::{Path, PathBuf};

use clap::Args;
use dupnet_core::estimators::DEFAULT_ESS_FRACTION;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{CommandSettings, CommonSettings, Context};
use crate::edgelist::serialize_graph;
use crate::error::{CliError, CliResult};
use crate::experiments::{relvar_table, RelvarParams, RELVAR_METHODS};
use crate::output::num;
use crate::settings::{parse_sizes, parse_theta};

/// Relative variance of IS, SMC and DPF across simulated graph sizes.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RelvarSettings {
    /// Flat JSON file of settings; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonSettings,
    /// Graph sizes as `lo..hi` (inclusive) or a comma-separated list.
    #[arg(long)]
    pub sizes: Option<String>,
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Parameters `pi,p,q,r` at which the likelihood is estimated.
    #[arg(long)]
    pub theta: Option<String>,
    /// Driving value of the IS and SMC proposals.
    #[arg(long)]
    pub driving: Option<String>,
    /// Parameters the test graphs are simulated under.
    #[arg(long)]
    pub generating: Option<String>,
    #[arg(long)]
    pub ess_fraction: Option<f64>,
    /// Also write each test graph as `graph_<size>.txt`.
    #[arg(long)]
    pub save_graphs: Option<bool>,
}

impl CommandSettings for RelvarSettings {
    const NAME: &'static str = "relvar";

    fn common(&self) -> &CommonSettings {
        &self.common
    }

    fn config_path(&self) -> Option<&Path> {
        self.config.as_deref()
    }

    fn resolve(mut self) -> CliResult<Self> {
        self.common.resolve();
        parse_sizes(self.sizes.get_or_insert_with(|| "5..13".into()))?;
        if *self.particles.get_or_insert(1000) == 0 {
            return Err(CliError::Usage("particles must be positive".into()));
        }
        if *self.reps.get_or_insert(30) == 0 {
            return Err(CliError::Usage("repetitions must be at least 1".into()));
        }
        parse_theta(self.theta.get_or_insert_with(|| "1,0.55,0.33,0".into()))?;
        parse_theta(self.driving.get_or_insert_with(|| "1,0.66,0.33,0".into()))?;
        parse_theta(self.generating.get_or_insert_with(|| "1,0.66,0.33,0".into()))?;
        let f = *self.ess_fraction.get_or_insert(DEFAULT_ESS_FRACTION);
        if f.is_nan() || f < 0.0 {
            return Err(CliError::Usage("ess-fraction must be nonnegative".into()));
        }
        self.save_graphs.get_or_insert(false);
        Ok(self)
    }

    fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let params = RelvarParams {
            sizes: parse_sizes(self.sizes.as_deref().unwrap_or_default())?,
            particles: self.particles.unwrap_or(1000),
            reps: self.reps.unwrap_or(30),
            theta: parse_theta(self.theta.as_deref().unwrap_or_default())?,
            driving: parse_theta(self.driving.as_deref().unwrap_or_default())?,
            generating: parse_theta(self.generating.as_deref().unwrap_or_default())?,
            ess_fraction: self.ess_fraction.unwrap_or(DEFAULT_ESS_FRACTION),
            seed: self.common.seed.unwrap_or(1),
        };
        if params.reps < 2 {
            ctx.warn("fewer than two repetitions: relative variances are undefined and reported as NaN");
        }
        let rows = relvar_table(&params)?;
        let mut header = vec!["size"];
        header.extend(RELVAR_METHODS);
        ctx.out.write_csv(
            "relvar.csv",
            &header,
            rows.iter().map(|row| {
                let mut line = vec![row.size.to_string()];
                line.extend(row.relvar.iter().map(|&v| num(v)));
                line
            }),
        )?;
        ctx.out.write_csv(
            "relvar_runs.csv",
            &["size", "method", "rep", "log_estimate", "log_exact"],
            rows.iter().flat_map(|row| {
                RELVAR_METHODS.iter().enumerate().flat_map(move |(m, name)| {
                    row.log_estimates[m].iter().enumerate().map(move |(r, &le)| {
                        vec![
                            row.size.to_string(),
                            name.to_string(),
                            r.to_string(),
                            num(le),
                            num(row.log_exact),
                        ]
                    })
                })
            }),
        )?;
        for row in &rows {
            if self.save_graphs.unwrap_or(false) {
                ctx.out
                    .write_text(&format!("graph_{}.txt", row.size), &serialize_graph(&row.graph))?;
            }
            let mut timing = json!({ "size": row.size, "edges": row.graph.edge_count() });
            for (m, name) in RELVAR_METHODS.iter().enumerate() {
                timing[format!("seconds_{name}")] = json!(row.seconds[m]);
            }
            ctx.timings.push(timing);
        }
        ctx.note("sizes", rows.len());
        Ok(())
    }
}
