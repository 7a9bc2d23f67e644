use alloc::format;
use core::fmt;

use crate::error::{Error, Result};

/// One coordinate of the DA parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    /// Probability of following the duplication rule.
    Pi,
    /// Probability of copying each link of the parent.
    P,
    /// Probability of linking to the parent under duplication.
    Q,
    /// Probability of linking to the parent under attachment.
    R,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::Pi, Component::P, Component::Q, Component::R];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Pi => "pi",
            Component::P => "p",
            Component::Q => "q",
            Component::R => "r",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// DA model parameters `(pi, p, q, r)`, each a probability, plus a mask of
/// which components are inference targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    values: [f64; 4],
    free: [bool; 4],
}

impl Theta {
    pub fn new(pi: f64, p: f64, q: f64, r: f64) -> Result<Self> {
        let values = [pi, p, q, r];
        for (c, v) in Component::ALL.into_iter().zip(values) {
            check_probability(c, v)?;
        }
        Ok(Self {
            values,
            free: [false; 4],
        })
    }

    pub fn pi(&self) -> f64 {
        self.values[0]
    }
    pub fn p(&self) -> f64 {
        self.values[1]
    }
    pub fn q(&self) -> f64 {
        self.values[2]
    }
    pub fn r(&self) -> f64 {
        self.values[3]
    }

    pub fn get(&self, c: Component) -> f64 {
        self.values[c.index()]
    }

    pub fn values(&self) -> [f64; 4] {
        self.values
    }

    /// Copy with component `c` replaced.
    pub fn with(mut self, c: Component, value: f64) -> Result<Self> {
        check_probability(c, value)?;
        self.values[c.index()] = value;
        Ok(self)
    }

    pub fn is_free(&self, c: Component) -> bool {
        self.free[c.index()]
    }

    pub fn with_free(mut self, c: Component, free: bool) -> Self {
        self.free[c.index()] = free;
        self
    }

    pub fn free_components(&self) -> impl Iterator<Item = Component> + '_ {
        Component::ALL.into_iter().filter(|c| self.is_free(*c))
    }

    /// True when every component lies strictly inside (0, 1).
    pub fn is_interior(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0 && v < 1.0)
    }
}

fn check_probability(c: Component, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{c} = {v} is not a probability")))
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(pi={}, p={}, q={}, r={})",
            self.values[0], self.values[1], self.values[2], self.values[3]
        )
    }
}
