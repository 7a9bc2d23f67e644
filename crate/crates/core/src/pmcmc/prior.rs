use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::math::ln;
use crate::theta::{Component, Theta};

/// Prior on one component of the parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentPrior {
    /// Not inferred; held at this value.
    Fixed(f64),
    /// Uniform on [0, 1].
    Uniform01,
    /// Beta(a, b) on [0, 1].
    Beta { a: f64, b: f64 },
}

impl ComponentPrior {
    pub fn is_fixed(&self) -> bool {
        matches!(self, ComponentPrior::Fixed(_))
    }

    fn log_density(&self, x: f64) -> f64 {
        match *self {
            ComponentPrior::Fixed(v) => {
                if x == v {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ if !(0.0..=1.0).contains(&x) => f64::NEG_INFINITY,
            ComponentPrior::Uniform01 => 0.0,
            ComponentPrior::Beta { a, b } => scaled_ln(a - 1.0, x) + scaled_ln(b - 1.0, 1.0 - x) - ln_beta(a, b),
        }
    }
}

fn scaled_ln(k: f64, x: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * ln(x)
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Independent priors on `(pi, p, q, r)`; fixed components are not inferred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    components: [ComponentPrior; 4],
}

impl PriorSpec {
    pub fn new(components: [ComponentPrior; 4]) -> Result<Self> {
        for (c, prior) in Component::ALL.into_iter().zip(components) {
            match prior {
                ComponentPrior::Fixed(v) if !(0.0..=1.0).contains(&v) => {
                    return Err(Error::InvalidParameter(format!(
                        "fixed value {v} for {c} is not a probability"
                    )))
                }
                ComponentPrior::Beta { a, b } if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) => {
                    return Err(Error::InvalidParameter(format!(
                        "Beta shapes for {c} must be positive, got ({a}, {b})"
                    )))
                }
                _ => {}
            }
        }
        if components.iter().all(ComponentPrior::is_fixed) {
            return Err(Error::InvalidParameter(
                "prior must leave at least one component free".into(),
            ));
        }
        Ok(Self { components })
    }

    /// One free component with `prior`, the others fixed at `base`.
    pub fn single(free: Component, prior: ComponentPrior, base: &Theta) -> Result<Self> {
        let mut components = base.values().map(ComponentPrior::Fixed);
        components[free.index()] = prior;
        Self::new(components)
    }

    pub fn component(&self, c: Component) -> ComponentPrior {
        self.components[c.index()]
    }

    pub fn free_components(&self) -> Vec<Component> {
        Component::ALL
            .into_iter()
            .filter(|c| !self.component(*c).is_fixed())
            .collect()
    }

    /// The free component, when there is exactly one.
    pub fn single_free(&self) -> Result<Component> {
        match self.free_components().as_slice() {
            [c] => Ok(*c),
            free => Err(Error::InvalidArgument(format!(
                "exactly one free component required, found {}",
                free.len()
            ))),
        }
    }

    /// Parameter vector with fixed components at their values, `c` at `x`,
    /// and other free components at 0.5.
    pub fn theta_at(&self, c: Component, x: f64) -> Result<Theta> {
        let mut values = [0.5; 4];
        for comp in Component::ALL {
            if let ComponentPrior::Fixed(v) = self.component(comp) {
                values[comp.index()] = v;
            }
        }
        values[c.index()] = x;
        self.theta_from(values)
    }

    fn theta_from(&self, values: [f64; 4]) -> Result<Theta> {
        let mut theta = Theta::new(values[0], values[1], values[2], values[3])?;
        for c in self.free_components() {
            theta = theta.with_free(c, true);
        }
        Ok(theta)
    }

    /// Log prior density; `-inf` outside the support or when a fixed
    /// component differs from its value.
    pub fn log_density(&self, theta: &Theta) -> f64 {
        Component::ALL
            .into_iter()
            .map(|c| self.component(c).log_density(theta.get(c)))
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Theta> {
        let mut values = [0.0; 4];
        for c in Component::ALL {
            values[c.index()] = match self.component(c) {
                ComponentPrior::Fixed(v) => v,
                ComponentPrior::Uniform01 => rng.gen::<f64>(),
                ComponentPrior::Beta { a, b } => Beta::new(a, b)
                    .map_err(|e| Error::InvalidParameter(format!("{e}")))?
                    .sample(rng),
            };
        }
        self.theta_from(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn base() -> Theta {
        Theta::new(1.0, 0.66, 0.33, 0.0).unwrap()
    }

    #[test]
    fn validation() {
        assert!(PriorSpec::new([ComponentPrior::Fixed(0.5); 4]).is_err());
        assert!(PriorSpec::single(Component::P, ComponentPrior::Beta { a: 0.0, b: 1.0 }, &base()).is_err());
        assert!(PriorSpec::single(Component::P, ComponentPrior::Uniform01, &base()).is_ok());
    }

    #[test]
    fn densities() {
        let u = PriorSpec::single(Component::P, ComponentPrior::Uniform01, &base()).unwrap();
        assert_eq!(u.log_density(&base()), 0.0);
        assert_eq!(
            u.log_density(&base().with(Component::Q, 0.4).unwrap()),
            f64::NEG_INFINITY
        );
        let b = PriorSpec::single(Component::P, ComponentPrior::Beta { a: 2.0, b: 3.0 }, &base()).unwrap();
        // Beta(2,3) density at 0.5 is 12 * 0.5 * 0.25 = 1.5.
        let t = base().with(Component::P, 0.5).unwrap();
        assert!((b.log_density(&t) - ln(1.5)).abs() < 1e-12);
        let one = PriorSpec::single(Component::P, ComponentPrior::Beta { a: 1.0, b: 1.0 }, &base()).unwrap();
        assert!(one.log_density(&base().with(Component::P, 0.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn samples_respect_fixed_components() {
        let prior = PriorSpec::single(Component::P, ComponentPrior::Beta { a: 2.0, b: 2.0 }, &base()).unwrap();
        let mut rng = stream(1, 2, 3);
        for _ in 0..100 {
            let t = prior.sample(&mut rng).unwrap();
            assert_eq!(t.pi(), 1.0);
            assert_eq!(t.q(), 0.33);
            assert!(t.is_free(Component::P));
            assert!(prior.log_density(&t).is_finite());
        }
    }
}
