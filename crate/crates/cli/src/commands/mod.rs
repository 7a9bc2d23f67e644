//! Subcommands: settings resolution, execution inside a worker pool, and
//! file output.

mod likelihood;
mod pmcmc;
mod posterior;
mod relvar;
mod simulate;

pub use likelihood::LikelihoodSettings;
pub use pmcmc::PmcmcSettings;
pub use posterior::PosteriorSettings;
pub use relvar::RelvarSettings;
pub use simulate::SimulateSettings;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use dupnet_core::estimators::{ResampleScheme, DEFAULT_ESS_FRACTION};
use dupnet_core::pmcmc::EstimatorChoice;
use dupnet_core::{simulate_da, Graph};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::edgelist::{read_graph, serialize_graph};
use crate::error::{CliError, CliResult};
use crate::output::{Manifest, OutputDir};
use crate::settings::{self, parse_driving, parse_method, parse_scheme, parse_theta, MethodName};

/// Settings every subcommand shares.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CommonSettings {
    /// Base random seed; every output is a function of the settings and this.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: $DUPNET_OUT_DIR, else the current directory].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads. Outputs do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl CommonSettings {
    fn resolve(&mut self) {
        self.seed.get_or_insert(1);
        self.workers.get_or_insert(1);
    }
}

/// Subcommand settings that can be merged with a config file and resolved
/// to concrete values.
pub trait CommandSettings: Serialize + DeserializeOwned + Clone + Default + Send + Sync {
    const NAME: &'static str;
    fn common(&self) -> &CommonSettings;
    fn config_path(&self) -> Option<&Path>;
    /// Fills in defaults and checks the values.
    fn resolve(self) -> CliResult<Self>;
    fn run(&self, ctx: &mut Context) -> CliResult<()>;
}

/// Where a command records its files and summary values.
pub struct Context {
    pub out: OutputDir,
    pub summary: Map<String, Value>,
    pub warnings: Vec<String>,
    pub timings: Vec<Value>,
}

impl Context {
    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        eprintln!("warning: {message}");
        self.warnings.push(message);
    }
}

fn seed_of<S: CommandSettings>(s: &S) -> u64 {
    s.common().seed.unwrap_or(1)
}

/// Resolves settings, runs the command in a pool of the requested size and
/// writes the manifest whatever the outcome.
pub fn execute<S: CommandSettings>(flags: S) -> CliResult<PathBuf> {
    let start = Instant::now();
    let resolved = flags
        .config_path()
        .map(settings::read_config_file)
        .transpose()
        .and_then(|file| settings::merge(file, &flags))
        .and_then(CommandSettings::resolve);
    let resolved = match resolved {
        Ok(r) => r,
        Err(e) => {
            let dir = settings::out_dir(flags.common().out.as_ref());
            let config = serde_json::to_value(&flags).unwrap_or(Value::Null);
            let mut manifest = Manifest::new(
                S::NAME,
                config,
                flags.common().seed,
                flags.common().workers.unwrap_or(1),
            );
            manifest.fail(&e);
            let _ = manifest.write(&dir);
            return Err(e);
        }
    };
    let common = resolved.common();
    let dir = settings::out_dir(common.out.as_ref());
    let workers = common.workers.unwrap_or(1);
    let mut manifest = Manifest::new(
        S::NAME,
        serde_json::to_value(&resolved).expect("settings serialize"),
        Some(seed_of(&resolved)),
        workers,
    );
    let result = OutputDir::create(&dir).and_then(|out| {
        let mut ctx = Context {
            out,
            summary: Map::new(),
            warnings: Vec::new(),
            timings: Vec::new(),
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| CliError::Runtime(format!("worker pool: {e}")))?;
        let r = pool.install(|| resolved.run(&mut ctx));
        manifest.outputs = ctx.out.files().to_vec();
        manifest.summary = ctx.summary;
        manifest.warnings = ctx.warnings;
        manifest.timings = ctx.timings;
        r
    });
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    if let Err(e) = &result {
        manifest.fail(e);
    }
    let written = manifest.write(&dir);
    result?;
    written
}

/// Input graph: a file, or a DA simulation from a single vertex.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GraphSettings {
    /// Edge-list file of the observed graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Simulate the observed graph with this many vertices instead.
    #[arg(long)]
    pub sim_size: Option<usize>,
    /// Parameters `pi,p,q,r` for the simulated graph.
    #[arg(long)]
    pub sim_theta: Option<String>,
    /// Seed of the simulated graph [default: the base seed].
    #[arg(long)]
    pub sim_seed: Option<u64>,
}

impl GraphSettings {
    fn resolve(&mut self, seed: u64) -> CliResult<()> {
        match (&self.graph, self.sim_size) {
            (None, None) => Err(CliError::Usage("give either --graph or --sim-size".into())),
            (Some(_), Some(_)) => Err(CliError::Usage("give only one of --graph and --sim-size".into())),
            (Some(_), None) => Ok(()),
            (None, Some(size)) => {
                if size == 0 {
                    return Err(CliError::Usage("simulated graph size must be at least 1".into()));
                }
                let t = self.sim_theta.get_or_insert_with(|| "1,0.66,0.33,0".into());
                parse_theta(t)?;
                self.sim_seed.get_or_insert(seed);
                Ok(())
            }
        }
    }

    /// Loads or simulates the graph; a simulated graph is saved as
    /// `graph.txt`.
    fn load(&self, ctx: &mut Context) -> CliResult<Graph> {
        let g = match (&self.graph, self.sim_size) {
            (Some(path), _) => read_graph(path)?,
            (None, Some(size)) => {
                let theta = parse_theta(self.sim_theta.as_deref().unwrap_or("1,0.66,0.33,0"))?;
                let g = simulate_da(&Graph::empty(1), &theta, size, self.sim_seed.unwrap_or(1))?.0;
                ctx.out.write_text("graph.txt", &serialize_graph(&g))?;
                g
            }
            (None, None) => return Err(CliError::Usage("no graph given".into())),
        };
        ctx.note("vertices", g.active_count());
        ctx.note("edges", g.edge_count());
        Ok(g)
    }
}

/// Estimator selection shared by `likelihood` and `pmcmc`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EstimatorSettings {
    /// exact, is, smc, dpf or combo.
    #[arg(long)]
    pub method: Option<String>,
    /// Particles (IS, SMC, combo SMC stage) or support budget (DPF).
    #[arg(long)]
    pub particles: Option<usize>,
    /// Proposal driving value: `uniform`, `target`, or `pi,p,q,r`.
    #[arg(long)]
    pub driving: Option<String>,
    /// stratified or multinomial.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Resample when ESS falls below this fraction of the particles.
    #[arg(long)]
    pub ess_fraction: Option<f64>,
    /// Combo: switch from SMC to the DPF at this many vertices.
    #[arg(long)]
    pub switch_size: Option<usize>,
    /// Combo: DPF budget per reduced state.
    #[arg(long)]
    pub dpf_particles: Option<usize>,
}

impl EstimatorSettings {
    fn resolve(&mut self, default_method: &str, default_particles: usize) -> CliResult<()> {
        parse_method(self.method.get_or_insert_with(|| default_method.into()))?;
        let particles = *self.particles.get_or_insert(default_particles);
        if particles == 0 {
            return Err(CliError::Usage("particles must be positive".into()));
        }
        parse_driving(self.driving.get_or_insert_with(|| "target".into()))?;
        parse_scheme(self.scheme.get_or_insert_with(|| "stratified".into()))?;
        let f = *self.ess_fraction.get_or_insert(DEFAULT_ESS_FRACTION);
        if f.is_nan() || f < 0.0 {
            return Err(CliError::Usage("ess-fraction must be nonnegative".into()));
        }
        self.switch_size.get_or_insert(10);
        if *self.dpf_particles.get_or_insert(particles) == 0 {
            return Err(CliError::Usage("dpf-particles must be positive".into()));
        }
        Ok(())
    }

    pub fn choice(&self) -> CliResult<EstimatorChoice> {
        let particles = self.particles.unwrap_or(1000);
        let driving = parse_driving(self.driving.as_deref().unwrap_or("target"))?;
        Ok(match parse_method(self.method.as_deref().unwrap_or("smc"))? {
            MethodName::Exact => EstimatorChoice::Exact,
            MethodName::Is => EstimatorChoice::Is { particles, driving },
            MethodName::Smc => EstimatorChoice::Smc {
                particles,
                driving,
                scheme: parse_scheme(self.scheme.as_deref().unwrap_or("stratified"))
                    .unwrap_or(ResampleScheme::Stratified),
                ess_fraction: self.ess_fraction.unwrap_or(DEFAULT_ESS_FRACTION),
            },
            MethodName::Dpf => EstimatorChoice::Dpf { particles },
            MethodName::Combo => EstimatorChoice::Combo {
                particles,
                driving,
                switch_size: self.switch_size.unwrap_or(10),
                dpf_particles: self.dpf_particles.unwrap_or(particles),
            },
        })
    }
}
