use dupnet_core::estimators::{
    combo_estimate, dpf_estimate, is_estimate, smc_estimate, ComboConfig, LikelihoodEstimate, ProposalKind,
    ResampleScheme, SmcConfig,
};
use dupnet_core::exact::exact_likelihood;
use dupnet_core::{simulate_da, Graph, Result, Theta};

fn theta0() -> Theta {
    Theta::new(1.0, 0.66, 0.33, 0.0).unwrap()
}

fn graph() -> Graph {
    simulate_da(&Graph::empty(1), &theta0(), 10, 17).unwrap().0
}

/// Mean of `L̂ / L` over `reps` seeds and its standard error.
fn ratio_stats(reps: u64, exact: f64, mut f: impl FnMut(u64) -> Result<LikelihoodEstimate>) -> (f64, f64) {
    let r: Vec<f64> = (0..reps).map(|s| f(s).unwrap().value() / exact).collect();
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let var = r.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn assert_unbiased(name: &str, (mean, se): (f64, f64)) {
    assert!(
        (mean - 1.0).abs() < 4.0 * se.max(1e-12),
        "{name}: mean ratio {mean} (se {se})"
    );
}

#[test]
fn all_estimators_are_unbiased() {
    let g = graph();
    let t = Theta::new(1.0, 0.55, 0.33, 0.0).unwrap();
    let exact = exact_likelihood(&g, &t).unwrap().value();
    let uniform = ProposalKind::UniformRemovable;
    let optimal = ProposalKind::OptimalConditional(theta0());
    assert_unbiased("is", ratio_stats(300, exact, |s| is_estimate(&g, &t, &uniform, 50, s)));
    assert_unbiased(
        "is-optimal",
        ratio_stats(300, exact, |s| is_estimate(&g, &t, &optimal, 50, s)),
    );
    for scheme in [ResampleScheme::Multinomial, ResampleScheme::Stratified] {
        let cfg = SmcConfig::new(50, optimal).with_scheme(scheme);
        assert_unbiased("smc", ratio_stats(300, exact, |s| smc_estimate(&g, &t, &cfg, s)));
    }
    let always = SmcConfig::new(20, uniform).with_ess_fraction(1.0);
    assert_unbiased(
        "smc-always",
        ratio_stats(300, exact, |s| smc_estimate(&g, &t, &always, s)),
    );
    assert_unbiased("dpf", ratio_stats(300, exact, |s| dpf_estimate(&g, &t, 8, s)));
    let combo = ComboConfig::new(SmcConfig::new(20, uniform), 6, 5);
    assert_unbiased("combo", ratio_stats(300, exact, |s| combo_estimate(&g, &t, &combo, s)));
}

#[test]
fn estimates_are_deterministic_in_the_seed() {
    let g = graph();
    let t = theta0();
    let cfg = SmcConfig::new(40, ProposalKind::UniformRemovable);
    assert_eq!(
        smc_estimate(&g, &t, &cfg, 3).unwrap(),
        smc_estimate(&g, &t, &cfg, 3).unwrap()
    );
    assert_ne!(
        smc_estimate(&g, &t, &cfg, 3).unwrap().log_value,
        smc_estimate(&g, &t, &cfg, 4).unwrap().log_value
    );
    assert_eq!(dpf_estimate(&g, &t, 5, 3).unwrap(), dpf_estimate(&g, &t, 5, 3).unwrap());
}

#[test]
fn dpf_support_never_exceeds_budget_after_thinning() {
    let g = simulate_da(&Graph::empty(1), &theta0(), 16, 2).unwrap().0;
    let e = dpf_estimate(&g, &theta0(), 12, 0).unwrap();
    assert!(!e.resample_steps.is_empty());
    let sum: f64 = e.segments.iter().sum();
    assert_eq!(sum.to_bits(), e.log_value.to_bits());
}
