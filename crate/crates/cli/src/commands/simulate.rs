use std::path::{Path, PathBuf};

use clap::Args;
use dupnet_core::{simulate_da, Graph};
use serde::{Deserialize, Serialize};

use super::{CommandSettings, CommonSettings, Context};
use crate::edgelist::{read_graph, serialize_graph};
use crate::error::{CliError, CliResult};
use crate::settings::parse_theta;

/// Simulate a DA graph and write it as an edge list.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateSettings {
    /// Flat JSON file of settings; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonSettings,
    /// Number of vertices to grow to.
    #[arg(long)]
    pub size: Option<usize>,
    /// Parameters `pi,p,q,r`.
    #[arg(long)]
    pub theta: Option<String>,
    /// Edge-list file of the starting graph [default: a single vertex].
    #[arg(long)]
    pub start: Option<PathBuf>,
    /// File name of the written graph inside the output directory.
    #[arg(long)]
    pub output: Option<String>,
}

impl CommandSettings for SimulateSettings {
    const NAME: &'static str = "simulate";

    fn common(&self) -> &CommonSettings {
        &self.common
    }

    fn config_path(&self) -> Option<&Path> {
        self.config.as_deref()
    }

    fn resolve(mut self) -> CliResult<Self> {
        self.common.resolve();
        match self.size {
            None => return Err(CliError::Usage("--size is required".into())),
            Some(0) => return Err(CliError::Usage("size must be at least 1".into())),
            Some(_) => {}
        }
        parse_theta(self.theta.get_or_insert_with(|| "1,0.66,0.33,0".into()))?;
        self.output.get_or_insert_with(|| "graph.txt".into());
        Ok(self)
    }

    fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let theta = parse_theta(self.theta.as_deref().unwrap_or_default())?;
        let start = match &self.start {
            Some(path) => read_graph(path)?,
            None => Graph::empty(1),
        };
        let size = self.size.unwrap_or(1);
        let (g, history) = simulate_da(&start, &theta, size, self.common.seed.unwrap_or(1))?;
        let name = self.output.clone().unwrap_or_else(|| "graph.txt".into());
        ctx.out.write_text(&name, &serialize_graph(&g))?;
        ctx.out.write_csv(
            "history.csv",
            &["step", "vertex"],
            history
                .as_slice()
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), v.to_string()]),
        )?;
        ctx.note("vertices", g.active_count());
        ctx.note("edges", g.edge_count());
        Ok(())
    }
}
