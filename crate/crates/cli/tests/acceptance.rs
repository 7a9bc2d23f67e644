//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run a subset by passing criterion numbers, e.g.
//! `cargo test -p dupnet --test acceptance -- 3 7`.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use dupnet::experiments::{pmcmc_run, relvar_table, PmcmcParams, RelvarParams, RelvarRow};
use dupnet::stats::{mean, ols_slope, sample_sd, t_critical_95_one_sided, t_statistic};
use dupnet_core::estimators::{dpf_estimate, is_estimate, smc_estimate, ProposalKind, ResampleScheme, SmcConfig};
use dupnet_core::exact::{brute_force_likelihoods, ExactSolver};
use dupnet_core::pmcmc::{ChainConfig, ComponentPrior, Driving, EstimatorChoice, PriorSpec};
use dupnet_core::rng::{derive_seed, stream, tag};
use dupnet_core::{simulate_da, Component, Graph, Theta};
use rand::Rng;
use rayon::prelude::*;
use tempfile::TempDir;

type Outcome = (bool, String);

fn theta0() -> Theta {
    Theta::new(1.0, 0.66, 0.33, 0.0).unwrap()
}

fn grow(size: usize, theta: &Theta, seed: u64) -> Graph {
    simulate_da(&Graph::empty(1), theta, size, seed).unwrap().0
}

fn random_theta<R: Rng>(rng: &mut R) -> Theta {
    let pi = if rng.gen_bool(0.3) {
        1.0
    } else {
        rng.gen_range(0.0..=1.0)
    };
    let r = if rng.gen_bool(0.3) {
        0.0
    } else {
        rng.gen_range(0.0..1.0)
    };
    Theta::new(pi, rng.gen_range(0.02..0.98), rng.gen_range(0.02..0.98), r).unwrap()
}

fn close_relative(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn close_log(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

fn oracle_equivalence() -> Outcome {
    let mut rng = stream(101, 0, 0);
    let thetas: Vec<Theta> = (0..24).map(|_| random_theta(&mut rng)).collect();
    let graphs: Vec<Graph> = (0..200)
        .map(|i| {
            let size = rng.gen_range(2..=8);
            let t = random_theta(&mut rng);
            grow(size, &t, derive_seed(101, tag::SIMULATE, i))
        })
        .collect();
    let worst = graphs
        .par_iter()
        .map(|g| {
            let brute = brute_force_likelihoods(g, &thetas).unwrap();
            let mut solver = ExactSolver::new(g).unwrap();
            thetas
                .iter()
                .zip(&brute)
                .map(|(t, &log_b)| {
                    let b = log_b.exp();
                    let e = solver.evaluate(t).value();
                    if close_relative(e, b, 0.0) {
                        0.0
                    } else {
                        (e - b).abs() / e.abs().max(b.abs())
                    }
                })
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    (
        worst <= 1e-12,
        format!("200 graphs x {} thetas, worst relative error {worst:e}", thetas.len()),
    )
}

fn dpf_exactness() -> Outcome {
    let mut rng = stream(202, 0, 0);
    let mut graphs = vec![
        Graph::from_edges(2, &[(0, 1)]).unwrap(),
        Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap(),
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(),
    ];
    for i in 0..120 {
        let size = rng.gen_range(3..=10);
        let t = random_theta(&mut rng);
        graphs.push(grow(size, &t, derive_seed(202, tag::SIMULATE, i)));
    }
    graphs.push(grow(10, &theta0(), 17));
    let jobs: Vec<(Graph, Theta, u64)> = graphs
        .into_iter()
        .enumerate()
        .flat_map(|(i, g)| {
            let ts: Vec<Theta> = (0..4).map(|_| random_theta(&mut rng)).collect();
            ts.into_iter()
                .enumerate()
                .map(move |(k, t)| (g.clone(), t, (i * 4 + k) as u64))
        })
        .collect();
    let worst = jobs
        .par_iter()
        .map(|(g, t, seed)| {
            let exact = ExactSolver::new(g).unwrap().evaluate(t).log_value;
            let dpf = dpf_estimate(g, t, 10_000, *seed).unwrap().log_value;
            if close_log(dpf, exact, 0.0) {
                0.0
            } else {
                (dpf - exact).abs()
            }
        })
        .reduce(|| 0.0, f64::max);
    (
        worst <= 1e-10,
        format!("{} graph/theta pairs, worst log error {worst:e}", jobs.len()),
    )
}

fn unbiasedness() -> Outcome {
    let g = grow(10, &theta0(), 17);
    let reps = 500;
    let n = 1000;
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [0.25, 0.55, 0.85] {
        let theta = theta0().with(Component::P, p).unwrap();
        let exact = ExactSolver::new(&g).unwrap().evaluate(&theta).value();
        let proposal = ProposalKind::OptimalConditional(theta);
        let smc = SmcConfig::new(n, proposal);
        for (m, name) in ["is", "smc", "dpf"].iter().enumerate() {
            let values: Vec<f64> = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let seed = derive_seed(303, tag::REPETITION, r as u64);
                    let e = match m {
                        0 => is_estimate(&g, &theta, &proposal, n, seed),
                        1 => smc_estimate(&g, &theta, &smc, seed),
                        _ => dpf_estimate(&g, &theta, n, seed),
                    };
                    e.unwrap().value()
                })
                .collect();
            let se = sample_sd(&values) / (reps as f64).sqrt();
            let err = mean(&values) - exact;
            if close_relative(mean(&values), exact, 1e-10) {
                detail.push(format!("p={p} {name} exact to rounding"));
                continue;
            }
            let z = err / se;
            ok &= z.abs() <= 4.0;
            detail.push(format!("p={p} {name} z={z:.2}"));
        }
    }
    (ok, detail.join(", "))
}

fn relvar_params(seed: u64) -> RelvarParams {
    RelvarParams {
        sizes: (5..=13).collect(),
        particles: 1000,
        reps: 30,
        theta: Theta::new(1.0, 0.55, 0.33, 0.0).unwrap(),
        driving: theta0(),
        generating: theta0(),
        ess_fraction: 0.5,
        seed,
    }
}

fn table_pattern(table: &[RelvarRow]) -> Outcome {
    let last = table.iter().find(|r| r.size == 13).unwrap();
    let [is, smc, dpf] = last.relvar;
    let ordered = dpf < smc && smc < is && is > 5.0 * dpf;
    let small = table
        .iter()
        .filter(|r| r.size <= 9)
        .flat_map(|r| r.relvar)
        .fold(0.0f64, f64::max);
    (
        ordered && small < 0.05,
        format!("size 13: is {is:.4}, smc {smc:.4}, dpf {dpf:.4}; max over sizes <= 9: {small:.4}"),
    )
}

fn log_slope(table: &[RelvarRow], m: usize) -> f64 {
    let (x, y): (Vec<f64>, Vec<f64>) = table
        .iter()
        .filter(|r| r.relvar[m] > 0.0)
        .map(|r| (r.size as f64, r.relvar[m].ln()))
        .unzip();
    ols_slope(&x, &y)
}

fn growth_rate(tables: &[Vec<RelvarRow>]) -> Outcome {
    let is: Vec<f64> = tables.iter().map(|t| log_slope(t, 0)).collect();
    let smc: Vec<f64> = tables.iter().map(|t| log_slope(t, 1)).collect();
    let diff: Vec<f64> = is.iter().zip(&smc).map(|(a, b)| a - b).collect();
    let t = t_statistic(&diff);
    let crit = t_critical_95_one_sided(diff.len() - 1);
    let fmt = |v: &[f64]| v.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>().join("/");
    (
        t > crit,
        format!(
            "IS slopes {}, SMC slopes {}, paired t = {t:.2} vs {crit}",
            fmt(&is),
            fmt(&smc)
        ),
    )
}

fn weight_degeneracy() -> Outcome {
    let g = grow(30, &theta0(), 606);
    let n = 1000;
    let proposal = ProposalKind::OptimalConditional(theta0());
    let is = is_estimate(&g, &theta0(), &proposal, n, 1).unwrap();
    let is_ess = is.final_ess.unwrap_or(f64::NAN);
    let smc = smc_estimate(&g, &theta0(), &SmcConfig::new(n, proposal), 1).unwrap();
    let steps = smc.trace.len();
    let healthy = smc.trace.iter().filter(|d| d.ess >= n as f64 / 2.0).count();
    let share = healthy as f64 / steps as f64;
    (
        is_ess < 0.05 * n as f64 && share >= 0.8,
        format!(
            "IS terminal ESS {is_ess:.1}; SMC ESS >= N/2 at {healthy}/{steps} steps ({:.0}%)",
            100.0 * share
        ),
    )
}

fn pmmh_correctness() -> Outcome {
    let g = grow(8, &theta0(), 707);
    let prior = PriorSpec::single(Component::P, ComponentPrior::Uniform01, &theta0()).unwrap();
    let kept = 50_000;
    let burn_in = 2_000;
    let choices = [
        ("exact", EstimatorChoice::Exact),
        (
            "smc",
            EstimatorChoice::Smc {
                particles: 100,
                driving: Driving::Target,
                scheme: ResampleScheme::Stratified,
                ess_fraction: 0.5,
            },
        ),
        ("dpf", EstimatorChoice::Dpf { particles: 100 }),
    ];
    let results: Vec<_> = choices
        .par_iter()
        .enumerate()
        .map(|(i, (name, choice))| {
            let mut chain = ChainConfig::new(burn_in + kept, *choice, derive_seed(707, tag::CHAIN, i as u64));
            chain.burn_in = burn_in;
            let params = PmcmcParams {
                prior,
                chain,
                max_lag: 1,
                companion: Some((1001, kept)),
            };
            (*name, pmcmc_run(&g, &params).unwrap())
        })
        .collect();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, r) in &results {
        let c = r.companion.as_ref().unwrap();
        ok &= r.trace.samples.len() == kept && c.chain_ks < 0.05;
        detail.push(format!(
            "{name} KS {:.4} (acc {:.2})",
            c.chain_ks,
            r.trace.acceptance_rate()
        ));
    }
    let rejection_ks = results[0].1.companion.as_ref().unwrap().rejection_ks;
    ok &= rejection_ks < 0.01;
    detail.push(format!("rejection KS {rejection_ks:.4}"));
    (ok, detail.join(", "))
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with("-manifest.json"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_dupnet"))
        .args(args)
        .env_remove("DUPNET_OUT_DIR")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn cli_determinism() -> Outcome {
    let tmp = TempDir::new().unwrap();
    let dir = |name: &str| tmp.path().join(name).to_string_lossy().into_owned();
    let graph = tmp
        .path()
        .join("first-simulate/graph.txt")
        .to_string_lossy()
        .into_owned();
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("simulate", vec!["--size", "12", "--seed", "8"]),
        (
            "likelihood",
            vec![
                "--graph",
                &graph,
                "--reps",
                "8",
                "--particles",
                "200",
                "--grid",
                "0.1:0.9:5",
            ],
        ),
        (
            "likelihood",
            vec![
                "--sim-size",
                "11",
                "--method",
                "combo",
                "--switch-size",
                "7",
                "--reps",
                "4",
            ],
        ),
        ("relvar", vec!["--sizes", "5..9", "--reps", "6", "--particles", "100"]),
        (
            "pmcmc",
            vec![
                "--graph",
                &graph,
                "--iterations",
                "400",
                "--burn-in",
                "50",
                "--companion",
                "true",
                "--grid-points",
                "201",
                "--rejection-draws",
                "300",
            ],
        ),
        (
            "pmcmc",
            vec![
                "--sim-size",
                "9",
                "--free",
                "p,q",
                "--method",
                "dpf",
                "--iterations",
                "300",
                "--burn-in",
                "30",
            ],
        ),
        (
            "posterior-exact",
            vec!["--graph", &graph, "--grid", "0:1:201", "--rejection-draws", "300"],
        ),
    ];
    let mut failures = Vec::new();
    for (k, (command, args)) in runs.iter().enumerate() {
        let first = if k == 0 {
            dir("first-simulate")
        } else {
            dir(&format!("first-{k}"))
        };
        let mut a = vec![*command];
        a.extend(args.iter().copied());
        a.extend(["--workers", "1", "--out", &first]);
        if !cli(&a) {
            failures.push(format!("{command} #{k} failed to run"));
            continue;
        }
        let manifest = format!("{first}/{command}-manifest.json");
        let again = dir(&format!("again-{k}"));
        let rerun = cli(&[command, "--config", &manifest, "--workers", "8", "--out", &again]);
        if !rerun || csv_files(Path::new(&first)) != csv_files(Path::new(&again)) {
            failures.push(format!("{command} #{k} differs at 8 workers"));
        }
        let repeat = dir(&format!("repeat-{k}"));
        let rerun = cli(&[command, "--config", &manifest, "--workers", "1", "--out", &repeat]);
        if !rerun || csv_files(Path::new(&first)) != csv_files(Path::new(&repeat)) {
            failures.push(format!("{command} #{k} differs on a repeat run"));
        }
    }
    let ok = failures.is_empty();
    let detail = if ok {
        format!("{} runs byte-identical at 1 and 8 workers", runs.len())
    } else {
        failures.join("; ")
    };
    (ok, detail)
}

fn smc_is_reduction() -> Outcome {
    let mut rng = stream(909, 0, 0);
    let mut mismatches = 0;
    for i in 0..100 {
        let size = rng.gen_range(3..=20);
        let g = grow(size, &random_theta(&mut rng), derive_seed(909, tag::SIMULATE, i));
        let theta = random_theta(&mut rng);
        let seed: u64 = rng.gen();
        let particles = rng.gen_range(1..=64);
        let proposal = if rng.gen_bool(0.5) {
            ProposalKind::UniformRemovable
        } else {
            ProposalKind::OptimalConditional(random_theta(&mut rng))
        };
        let scheme = if rng.gen_bool(0.5) {
            ResampleScheme::Stratified
        } else {
            ResampleScheme::Multinomial
        };
        let cfg = SmcConfig::new(particles, proposal)
            .with_scheme(scheme)
            .with_ess_fraction(0.0);
        let s = smc_estimate(&g, &theta, &cfg, seed).unwrap();
        let t = is_estimate(&g, &theta, &proposal, particles, seed).unwrap();
        if s.log_value.to_bits() != t.log_value.to_bits() {
            mismatches += 1;
        }
    }
    (mismatches == 0, format!("{mismatches}/100 triples differ"))
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |k: usize| selected.is_empty() || selected.contains(&k);
    let mut tables: Vec<Vec<RelvarRow>> = Vec::new();
    let mut relvar_tables = |count: usize| -> Vec<Vec<RelvarRow>> {
        while tables.len() < count {
            let seed = derive_seed(404, tag::REPETITION, tables.len() as u64);
            tables.push(relvar_table(&relvar_params(seed)).unwrap());
        }
        tables.clone()
    };

    let mut failed = 0;
    for k in 1..=9 {
        if !wanted(k) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match k {
            1 => oracle_equivalence(),
            2 => dpf_exactness(),
            3 => unbiasedness(),
            4 => table_pattern(&relvar_tables(1)[0]),
            5 => growth_rate(&relvar_tables(5)),
            6 => weight_degeneracy(),
            7 => pmmh_correctness(),
            8 => cli_determinism(),
            _ => smc_is_reduction(),
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {k}: {verdict} ({detail}) [{:.1}s]",
            start.elapsed().as_secs_f64()
        );
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of {} selected criteria failed", (1..=9).filter(|&k| wanted(k)).count());
        std::process::exit(1);
    }
}
