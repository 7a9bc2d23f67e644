//! Log-space arithmetic.
//!
//! Everything goes through `libm` so results are bit-identical with and
//! without `std`.

/// Natural logarithm, `ln(0) = -inf`.
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// `k * ln_x` with the convention `0 * ln(0) = 0`, i.e. `x^0 = 1` even for `x = 0`.
#[inline]
pub fn ln_pow(ln_x: f64, k: u32) -> f64 {
    if k == 0 {
        0.0
    } else {
        f64::from(k) * ln_x
    }
}

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + libm::log1p(exp(lo - hi))
}

/// `ln(sum(exp(x)))`, returning `-inf` for an empty slice or all `-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| exp(v - max)).sum();
    max + ln(sum)
}

/// Log of the arithmetic mean of `exp(values)`.
pub fn log_mean_exp(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NEG_INFINITY;
    }
    log_sum_exp(values) - ln(values.len() as f64)
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub const fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += exp(x - self.max);
        } else {
            self.scaled = self.scaled * exp(self.max - x) + 1.0;
            self.max = x;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + ln(self.scaled)
        }
    }
}

/// Normalizes log weights into linear weights summing to one.
///
/// Returns `None` when every weight is zero.
pub fn normalize_log_weights(log_weights: &[f64]) -> Option<alloc::vec::Vec<f64>> {
    let total = log_sum_exp(log_weights);
    if total == f64::NEG_INFINITY || total.is_nan() {
        return None;
    }
    Some(log_weights.iter().map(|&w| exp(w - total)).collect())
}

#[inline]
pub fn logit(x: f64) -> f64 {
    ln(x) - libm::log1p(-x)
}

#[inline]
pub fn expit(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + exp(-y))
    } else {
        let e = exp(y);
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_handles_infinities() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[ln(0.25), ln(0.75)]);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn streaming_matches_slice() {
        let xs = [-3.0, 10.0, -700.0, 2.5, f64::NEG_INFINITY, 9.99];
        let mut acc = LogSum::new();
        for &x in &xs {
            acc.add(x);
        }
        assert!((acc.value() - log_sum_exp(&xs)).abs() < 1e-12);
    }

    #[test]
    fn no_underflow_for_tiny_weights() {
        let xs = [-1000.0, -1000.0];
        assert!((log_sum_exp(&xs) - (-1000.0 + ln(2.0))).abs() < 1e-12);
        assert!((log_add_exp(-1000.0, -1000.0) - (-1000.0 + ln(2.0))).abs() < 1e-12);
    }

    #[test]
    fn zero_power_of_zero_is_one() {
        assert_eq!(ln_pow(ln(0.0), 0), 0.0);
        assert_eq!(ln_pow(ln(0.0), 2), f64::NEG_INFINITY);
    }

    #[test]
    fn logit_round_trip() {
        for &x in &[1e-9, 0.1, 0.5, 0.66, 0.999] {
            assert!((expit(logit(x)) - x).abs() < 1e-12);
        }
    }
}
