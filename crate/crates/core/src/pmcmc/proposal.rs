use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math::{expit, ln, logit};
use crate::theta::Theta;

use super::prior::PriorSpec;

/// `ln[c'(1 - c') / (c(1 - c))]`, the log Jacobian ratio of a logit-scale
/// move from `from` to `to`.
pub fn logit_jacobian_log_ratio(from: f64, to: f64) -> f64 {
    ln(to) + ln(1.0 - to) - ln(from) - ln(1.0 - from)
}

/// Gaussian random walk with standard deviation `sigma` on the logit of
/// every free component of `prior`.
///
/// Returns the proposal and `ln[q(θ | θ') / q(θ' | θ)]`.
pub fn logit_rw_propose<R: Rng + ?Sized>(
    theta: &Theta,
    sigma: f64,
    prior: &PriorSpec,
    rng: &mut R,
) -> Result<(Theta, f64)> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidArgument(
            "step size must be finite and nonnegative".into(),
        ));
    }
    let mut next = *theta;
    let mut log_ratio = 0.0;
    for c in prior.free_components() {
        let x = theta.get(c);
        if x <= 0.0 || x >= 1.0 {
            return Err(Error::Boundary(c));
        }
        let z: f64 = rng.sample(StandardNormal);
        let y = expit(logit(x) + sigma * z);
        next = next.with(c, y)?;
        log_ratio += logit_jacobian_log_ratio(x, y);
    }
    Ok((next, log_ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmcmc::ComponentPrior;
    use crate::rng::stream;
    use crate::theta::Component;

    fn prior() -> PriorSpec {
        PriorSpec::single(
            Component::P,
            ComponentPrior::Uniform01,
            &Theta::new(1.0, 0.5, 0.33, 0.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn jacobian_examples() {
        assert!((logit_jacobian_log_ratio(0.5, 0.8) + 0.44629).abs() < 1e-5);
        assert_eq!(logit_jacobian_log_ratio(0.5, 0.5), 0.0);
    }

    #[test]
    fn zero_step_is_identity() {
        let t = Theta::new(1.0, 0.3, 0.33, 0.0).unwrap();
        let (next, ratio) = logit_rw_propose(&t, 0.0, &prior(), &mut stream(0, 0, 0)).unwrap();
        assert!((next.p() - 0.3).abs() < 1e-15);
        assert!(ratio.abs() < 1e-12);
    }

    #[test]
    fn only_free_components_move() {
        let t = Theta::new(1.0, 0.3, 0.33, 0.0).unwrap();
        let mut rng = stream(1, 0, 0);
        for _ in 0..100 {
            let (next, _) = logit_rw_propose(&t, 0.5, &prior(), &mut rng).unwrap();
            assert_eq!(next.pi(), 1.0);
            assert_eq!(next.q(), 0.33);
            assert_eq!(next.r(), 0.0);
            assert!(next.p() > 0.0 && next.p() < 1.0);
        }
    }

    #[test]
    fn boundary_is_error() {
        let t = Theta::new(1.0, 1.0, 0.33, 0.0).unwrap();
        assert_eq!(
            logit_rw_propose(&t, 0.5, &prior(), &mut stream(0, 0, 0)),
            Err(Error::Boundary(Component::P))
        );
    }
}
