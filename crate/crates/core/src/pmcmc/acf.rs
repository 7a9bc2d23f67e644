use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Sample autocorrelations of `series` at lags `0..=max_lag`.
///
/// Lag `k` is the mean lagged cross product over the `n - k` available
/// pairs divided by the sample variance, so lag 0 is exactly 1.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n <= max_lag {
        return Err(Error::InvalidArgument(alloc::format!(
            "series of length {n} is too short for lag {max_lag}"
        )));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let var = centered.iter().map(|x| x * x).sum::<f64>() / n as f64;
    if var.is_nan() || var <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok((0..=max_lag)
        .map(|k| {
            if k == 0 {
                return 1.0;
            }
            let cov: f64 = centered.iter().zip(&centered[k..]).map(|(a, b)| a * b).sum();
            cov / (n - k) as f64 / var
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn alternating_series() {
        let s: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = acf(&s, 2).unwrap();
        assert_eq!(r[0], 1.0);
        assert!((r[1] + 1.0).abs() < 1e-12);
        assert!((r[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn white_noise_is_uncorrelated() {
        let mut rng = stream(4, 0, 0);
        let s: Vec<f64> = (0..100_000).map(|_| rng.gen::<f64>()).collect();
        let r = acf(&s, 20).unwrap();
        for v in &r[1..] {
            assert!(v.abs() < 0.01);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(acf(&[2.0; 10], 3), Err(Error::ConstantSeries));
        assert!(acf(&[1.0, 2.0], 2).is_err());
    }
}
