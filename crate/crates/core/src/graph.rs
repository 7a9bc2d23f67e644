use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitset::{iter_words, word_count, VertexSet};
use crate::error::{Error, Result};

/// Adjacency of the originally observed graph, shared by all of its reduced
/// states.
#[derive(PartialEq, Eq)]
struct Topology {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl Topology {
    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }
}

/// Undirected simple graph over the labels `0..n` of an observed graph, of
/// which some subset is active.
///
/// Deleting a vertex deactivates its label instead of relabeling, so every
/// reduced state is an induced subgraph of the original and is identified by
/// its active set. Clones share the adjacency.
#[derive(Clone)]
pub struct Graph {
    topo: Arc<Topology>,
    active: VertexSet,
}

/// Vertices `u` from which `v` could have been produced by copying.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateParents {
    /// Every `u != v` with `N(v) \ {u} ⊆ N(u) \ {v}`.
    pub all: VertexSet,
    /// The subset with `N(v) ⊆ {u}`, the only parents usable by the
    /// attachment rule.
    pub attach_only: VertexSet,
}

impl Graph {
    /// `n` isolated active vertices.
    pub fn empty(n: usize) -> Self {
        let words = word_count(n);
        Self {
            topo: Arc::new(Topology {
                n,
                words,
                adj: vec![0; n * words],
            }),
            active: VertexSet::full(n),
        }
    }

    /// Builds a graph on `0..n` from an edge list. Rejects self-loops,
    /// duplicate edges (in either orientation) and out-of-range labels.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let words = word_count(n);
        let mut adj = vec![0u64; n * words];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) has a label outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            let (wu, bu) = (u / 64, 1u64 << (u % 64));
            let (wv, bv) = (v / 64, 1u64 << (v % 64));
            if adj[u * words + wv] & bv != 0 {
                return Err(Error::InvalidArgument(format!("duplicate edge ({u}, {v})")));
            }
            adj[u * words + wv] |= bv;
            adj[v * words + wu] |= bu;
        }
        Ok(Self {
            topo: Arc::new(Topology { n, words, adj }),
            active: VertexSet::full(n),
        })
    }

    /// Builds a graph from symmetric neighbor sets.
    pub(crate) fn from_neighbor_sets(sets: &[VertexSet]) -> Self {
        let n = sets.len();
        let words = word_count(n);
        let mut adj = vec![0u64; n * words];
        for (v, set) in sets.iter().enumerate() {
            debug_assert!(!set.contains(v));
            for (i, w) in set.words().iter().enumerate().take(words) {
                adj[v * words + i] = *w;
            }
        }
        let g = Self {
            topo: Arc::new(Topology { n, words, adj }),
            active: VertexSet::full(n),
        };
        debug_assert!(g.is_symmetric());
        g
    }

    /// Size of the label universe (vertex count of the original graph).
    pub fn capacity(&self) -> usize {
        self.topo.n
    }

    pub fn active(&self) -> &VertexSet {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, v: usize) -> bool {
        self.active.contains(v)
    }

    /// Active-set bitmask, available when the universe has at most 64 labels.
    pub fn mask(&self) -> Option<u64> {
        if self.topo.n <= 64 {
            self.active.as_mask()
        } else {
            None
        }
    }

    /// Same adjacency restricted to another active set.
    pub fn induced(&self, active: VertexSet) -> Result<Self> {
        if active.words().len() != self.topo.words || active.iter().any(|v| v >= self.topo.n) {
            return Err(Error::InvalidArgument(
                "active set does not match the graph's label universe".into(),
            ));
        }
        Ok(Self {
            topo: Arc::clone(&self.topo),
            active,
        })
    }

    /// Raw adjacency row of `v`, including inactive neighbors.
    #[inline]
    pub(crate) fn row(&self, v: usize) -> &[u64] {
        self.topo.row(v)
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        let words = self
            .row(v)
            .iter()
            .zip(self.active.words())
            .map(|(a, b)| a & b)
            .collect();
        VertexSet::from_words(words)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v)
            .iter()
            .zip(self.active.words())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.is_active(u) && self.is_active(v) && self.row(u)[v / 64] & (1u64 << (v % 64)) != 0
    }

    /// Active edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in self.active.iter() {
            for v in self.neighbors(u).iter().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.active.iter().map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// The graph with `v` and its incident edges removed.
    pub fn delete_vertex(&self, v: usize) -> Result<Self> {
        if !self.is_active(v) {
            return Err(Error::InactiveVertex(v));
        }
        let mut active = self.active.clone();
        active.remove(v);
        Ok(Self {
            topo: Arc::clone(&self.topo),
            active,
        })
    }

    /// Tests `N(v) \ {u} ⊆ N(u) \ {v}` over the active vertices. Both labels
    /// must be active and distinct.
    #[inline]
    pub(crate) fn can_copy(&self, v: usize, u: usize) -> bool {
        let (uw, ub) = (u / 64, 1u64 << (u % 64));
        self.row(v)
            .iter()
            .zip(self.row(u))
            .zip(self.active.words())
            .enumerate()
            .all(|(i, ((nv, nu), act))| {
                let mut lhs = nv & act;
                if i == uw {
                    lhs &= !ub;
                }
                lhs & !nu == 0
            })
    }

    pub fn candidate_parents(&self, v: usize) -> Result<CandidateParents> {
        if !self.is_active(v) {
            return Err(Error::InactiveVertex(v));
        }
        let mut all = VertexSet::empty(self.topo.n);
        let mut attach_only = VertexSet::empty(self.topo.n);
        let degree = self.degree(v);
        for u in self.active.iter().filter(|&u| u != v) {
            if self.can_copy(v, u) {
                all.insert(u);
                if degree == 0 || (degree == 1 && self.has_edge(u, v)) {
                    attach_only.insert(u);
                }
            }
        }
        Ok(CandidateParents { all, attach_only })
    }

    /// Whether `v` has at least one candidate parent.
    pub fn is_removable(&self, v: usize) -> bool {
        self.is_active(v) && self.active.iter().any(|u| u != v && self.can_copy(v, u))
    }

    /// All active vertices with at least one candidate parent.
    pub fn removable_set(&self) -> VertexSet {
        let mut out = VertexSet::empty(self.topo.n);
        for v in self.active.iter() {
            if self.is_removable(v) {
                out.insert(v);
            }
        }
        out
    }

    /// True when no vertex is removable. A graph with at most one active
    /// vertex is irreducible.
    pub fn is_irreducible(&self) -> bool {
        !self.active.iter().any(|v| self.is_removable(v))
    }

    /// Relabels the active vertices to `0..active_count` in ascending order.
    pub fn compact(&self) -> Self {
        let labels: Vec<usize> = self.active.to_vec();
        let mut index = vec![usize::MAX; self.topo.n];
        for (i, &v) in labels.iter().enumerate() {
            index[v] = i;
        }
        let mut sets: Vec<VertexSet> = (0..labels.len()).map(|_| VertexSet::empty(labels.len())).collect();
        for (i, &v) in labels.iter().enumerate() {
            for w in iter_words(self.row(v)) {
                if self.active.contains(w) {
                    sets[i].insert(index[w]);
                }
            }
        }
        Self::from_neighbor_sets(&sets)
    }

    /// Applies a label permutation: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.topo.n;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("not a permutation of the labels".into()));
        }
        let mut sets: Vec<VertexSet> = (0..n).map(|_| VertexSet::empty(n)).collect();
        for v in 0..n {
            for w in iter_words(self.row(v)) {
                sets[perm[v]].insert(perm[w]);
            }
        }
        let mut active = VertexSet::empty(n);
        for v in self.active.iter() {
            active.insert(perm[v]);
        }
        Self::from_neighbor_sets(&sets).induced(active)
    }

    fn is_symmetric(&self) -> bool {
        (0..self.topo.n)
            .all(|v| iter_words(self.row(v)).all(|w| w != v && self.row(w)[v / 64] & (1u64 << (v % 64)) != 0))
    }
}

/// Two graphs are equal when they share a label universe, an active set and
/// the same edges among active vertices.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.topo.n == other.topo.n
            && self.active == other.active
            && self.active.iter().all(|v| self.neighbors(v) == other.neighbors(v))
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.topo.n)
            .field("active", &self.active)
            .field("edges", &self.edges())
            .finish()
    }
}
