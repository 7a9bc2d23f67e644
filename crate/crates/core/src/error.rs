use alloc::string::String;

use crate::theta::Component;

/// Errors raised by graph operations, likelihood evaluation and inference.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("vertex {0} is not active in the graph")]
    InactiveVertex(usize),
    #[error("graph has {0} active vertices; a DA transition needs at least two")]
    TooFewVertices(usize),
    #[error("graph is irreducible; no vertex can be removed")]
    Irreducible,
    #[error("{what}: graph has {size} vertices but the limit is {limit}; use a Monte Carlo estimator")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("likelihood is zero at every grid point")]
    DegeneratePosterior,
    #[error("component {0} is on the boundary of [0, 1]")]
    Boundary(Component),
    #[error("no prior draw with positive likelihood estimate after {attempts} attempts")]
    Initialization { attempts: usize },
    #[error("series is constant; autocorrelation is undefined")]
    ConstantSeries,
    #[error("all particle weights are zero")]
    WeightCollapse,
}

pub type Result<T> = core::result::Result<T, Error>;
