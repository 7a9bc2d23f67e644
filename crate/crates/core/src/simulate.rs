use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream, tag};
use crate::theta::Theta;

/// Vertices in the order they are removed: element `k` is removed at step
/// `k`, so the most recently added vertex comes first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RemovalPath(pub Vec<usize>);

impl RemovalPath {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Checks that the labels are distinct and that each vertex is removable
    /// when its turn comes. Returns the reduced graph at the end of the path.
    pub fn validate(&self, g: &Graph) -> Result<Graph> {
        let mut seen = BTreeSet::new();
        let mut current = g.clone();
        for (k, &v) in self.0.iter().enumerate() {
            if !seen.insert(v) {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} appears twice in the removal path"
                )));
            }
            if !current.is_removable(v) {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} is not removable at step {k}"
                )));
            }
            current = current.delete_vertex(v)?;
        }
        Ok(current)
    }
}

/// Grows `seed_graph` to `target_size` vertices under the DA model.
///
/// The seed's active vertices are relabeled `0..m` and each new vertex takes
/// the next label. Each step picks a parent uniformly; with probability `π`
/// the new vertex copies every parent link independently with probability `p`
/// and links to the parent with probability `q`, otherwise it links to the
/// parent with probability `r`. Also returns the true history as a removal
/// path (newest vertex first).
pub fn simulate_da(
    seed_graph: &Graph,
    theta: &Theta,
    target_size: usize,
    rng_seed: u64,
) -> Result<(Graph, RemovalPath)> {
    let seed = seed_graph.compact();
    let start = seed.capacity();
    if target_size < start {
        return Err(Error::InvalidArgument(format!(
            "target size {target_size} is smaller than the seed graph ({start} vertices)"
        )));
    }
    if start == 0 && target_size > 0 {
        return Err(Error::InvalidArgument("cannot grow an empty seed graph".into()));
    }
    let mut rng = stream(rng_seed, tag::SIMULATE, 0);
    let mut adj: Vec<VertexSet> = (0..target_size).map(|_| VertexSet::empty(target_size)).collect();
    for (u, v) in seed.edges() {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    for new in start..target_size {
        let parent = rng.gen_range(0..new);
        if rng.gen::<f64>() < theta.pi() {
            let inherited: Vec<usize> = adj[parent].iter().collect();
            for w in inherited {
                if rng.gen::<f64>() < theta.p() {
                    adj[new].insert(w);
                    adj[w].insert(new);
                }
            }
            if rng.gen::<f64>() < theta.q() {
                adj[new].insert(parent);
                adj[parent].insert(new);
            }
        } else if rng.gen::<f64>() < theta.r() {
            adj[new].insert(parent);
            adj[parent].insert(new);
        }
    }
    let history = RemovalPath((start..target_size).rev().collect());
    Ok((Graph::from_neighbor_sets(&adj), history))
}
