//! Small summary statistics used by the experiments.

use dupnet_core::math::exp;
use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (divisor `n - 1`); NaN for fewer than two values.
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// `(1/R) Σ (L̂_r / L - 1)²` from log estimates and the exact log value.
pub fn relative_variance(log_estimates: &[f64], log_exact: f64) -> f64 {
    let r = log_estimates.len() as f64;
    log_estimates
        .iter()
        .map(|le| {
            let d = exp(le - log_exact) - 1.0;
            d * d
        })
        .sum::<f64>()
        / r
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// One-sample t statistic of `diffs` against zero.
pub fn t_statistic(diffs: &[f64]) -> f64 {
    mean(diffs) / (sample_sd(diffs) / (diffs.len() as f64).sqrt())
}

/// Upper 5% point of Student's t with `df` degrees of freedom.
pub fn t_critical_95_one_sided(df: usize) -> f64 {
    if df == 0 {
        return f64::INFINITY;
    }
    StudentsT::new(0.0, 1.0, df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.95)
}

/// Equal-width histogram on `[lo, hi]`: `(bin_lo, bin_hi, count, density)`.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64, usize, f64)> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if v >= lo && v <= hi {
            let i = (((v - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
    }
    let n = values.len() as f64;
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let a = lo + width * i as f64;
            (a, a + width, c, c as f64 / (n * width))
        })
        .collect()
}
