use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::{ln, LogSum};
use crate::theta::Theta;
use crate::transition::{LogTheta, ParentStat};

/// Largest graph the bitmask-keyed recursion accepts.
pub const EXACT_LIMIT: usize = 64;

/// Log likelihoods of reduced states, keyed by active-set bitmask.
#[derive(Debug, Clone, Default)]
pub struct MemoTable {
    entries: HashMap<u64, f64>,
}

impl MemoTable {
    pub fn get(&self, mask: u64) -> Option<f64> {
        self.entries.get(&mask).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Entries sorted by mask.
    pub fn entries(&self) -> Vec<(u64, f64)> {
        let mut out: Vec<_> = self.entries.iter().map(|(&k, &v)| (k, v)).collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }
}

/// Irreducible states reached by the recursion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TerminalInfo {
    /// Active-set masks of every irreducible state reached.
    pub masks: BTreeSet<u64>,
    /// Distinct vertex counts among those states.
    pub sizes: BTreeSet<usize>,
}

impl TerminalInfo {
    /// True when removal paths end at irreducible graphs of different sizes,
    /// so the number of removal steps is not fixed.
    pub fn is_heterogeneous(&self) -> bool {
        self.sizes.len() > 1
    }
}

/// Result of the exact recursion.
#[derive(Debug, Clone)]
pub struct ExactLikelihood {
    pub log_value: f64,
    pub terminals: TerminalInfo,
    /// Number of distinct states evaluated.
    pub states: usize,
}

impl ExactLikelihood {
    pub fn value(&self) -> f64 {
        crate::math::exp(self.log_value)
    }
}

/// Memoized evaluation of `L(G) = (1/n) Σ_{v removable} ω(G, v) L(G - v)`
/// with `L = 1` on irreducible graphs.
///
/// Reusable across parameter values; the memo is cleared whenever the
/// parameters change.
pub struct ExactSolver {
    n: usize,
    adj: Vec<u64>,
    root: u64,
    memo: MemoTable,
    memo_theta: Option<Theta>,
    terminals: TerminalInfo,
}

impl ExactSolver {
    pub fn new(g: &Graph) -> Result<Self> {
        let n = g.capacity();
        if n > EXACT_LIMIT {
            return Err(Error::Capacity {
                what: "exact likelihood",
                size: n,
                limit: EXACT_LIMIT,
            });
        }
        let adj = (0..n).map(|v| g.neighbors(v).as_mask().unwrap_or(0)).collect();
        Ok(Self {
            n,
            adj,
            root: g.mask().unwrap_or(0),
            memo: MemoTable::default(),
            memo_theta: None,
            terminals: TerminalInfo::default(),
        })
    }

    pub fn memo(&self) -> &MemoTable {
        &self.memo
    }

    pub fn clear(&mut self) {
        self.memo.clear();
        self.memo_theta = None;
        self.terminals = TerminalInfo::default();
    }

    /// Exact likelihood of the full graph.
    pub fn evaluate(&mut self, theta: &Theta) -> ExactLikelihood {
        self.evaluate_mask(self.root, theta)
    }

    /// Exact likelihood of the induced subgraph on `mask`.
    pub fn evaluate_mask(&mut self, mask: u64, theta: &Theta) -> ExactLikelihood {
        if self.memo_theta.as_ref() != Some(theta) {
            self.clear();
            self.memo_theta = Some(*theta);
        }
        let lt = LogTheta::new(theta);
        let log_value = self.solve(mask & self.universe(), &lt);
        ExactLikelihood {
            log_value,
            terminals: self.terminals.clone(),
            states: self.memo.len(),
        }
    }

    fn universe(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    fn solve(&mut self, mask: u64, lt: &LogTheta) -> f64 {
        if let Some(v) = self.memo.get(mask) {
            return v;
        }
        let n_active = mask.count_ones();
        let mut total = LogSum::new();
        let mut reducible = false;
        let mut vs = mask;
        while vs != 0 {
            let v = vs.trailing_zeros() as usize;
            vs &= vs - 1;
            let nv = self.adj[v] & mask;
            let deg_v = nv.count_ones();
            let mut omega = LogSum::new();
            let mut has_parent = false;
            let mut us = mask & !(1u64 << v);
            while us != 0 {
                let u = us.trailing_zeros() as usize;
                us &= us - 1;
                let ubit = 1u64 << u;
                let nu = self.adj[u] & mask;
                if nv & !ubit & !nu != 0 {
                    continue;
                }
                has_parent = true;
                let linked = nv & ubit != 0;
                let copied = deg_v - u32::from(linked);
                let dropped = nu.count_ones() - u32::from(linked) - copied;
                omega.add(term(lt, copied, dropped, linked));
            }
            if has_parent {
                reducible = true;
                let log_omega = omega.value() - ln(f64::from(n_active - 1));
                if log_omega > f64::NEG_INFINITY {
                    let child = self.solve(mask & !(1u64 << v), lt);
                    total.add(log_omega + child);
                }
            }
        }
        let value = if reducible {
            total.value() - ln(f64::from(n_active))
        } else {
            self.terminals.masks.insert(mask);
            self.terminals.sizes.insert(n_active as usize);
            0.0
        };
        self.memo.entries.insert(mask, value);
        value
    }
}

#[inline]
fn term(lt: &LogTheta, copied: u32, dropped: u32, linked: bool) -> f64 {
    ParentStat {
        copied,
        dropped,
        linked,
        attach: copied == 0,
    }
    .log_term(lt)
}

/// Exact log likelihood of `g` under `theta`, with terminal-state info.
///
/// Cost is proportional to the number of induced subgraphs reachable by
/// removals, each visited once.
pub fn exact_likelihood(g: &Graph, theta: &Theta) -> Result<ExactLikelihood> {
    Ok(ExactSolver::new(g)?.evaluate(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn theta0() -> Theta {
        Theta::new(1.0, 0.66, 0.33, 0.0).unwrap()
    }

    #[test]
    fn single_node_is_one() {
        let r = exact_likelihood(&Graph::empty(1), &theta0()).unwrap();
        assert_eq!(r.log_value, 0.0);
        assert_eq!(r.terminals.sizes.iter().copied().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn small_closed_forms() {
        let r = exact_likelihood(&edge(), &theta0()).unwrap();
        assert!((r.value() - 0.33).abs() < 1e-15);
        let r = exact_likelihood(&k3(), &theta0()).unwrap();
        assert!((r.value() - 0.071874).abs() < 1e-15);
        let r = exact_likelihood(&path3(), &theta0()).unwrap();
        assert!((r.value() - 0.060984).abs() < 1e-15);
    }

    #[test]
    fn irreducible_graph_has_unit_likelihood() {
        let r = exact_likelihood(&cycle(5), &theta0()).unwrap();
        assert_eq!(r.log_value, 0.0);
        assert_eq!(r.states, 1);
    }

    #[test]
    fn too_large_is_capacity_error() {
        let g = Graph::empty(65);
        assert!(matches!(
            exact_likelihood(&g, &theta0()),
            Err(Error::Capacity { size: 65, .. })
        ));
    }

    #[test]
    fn memo_entries_match_induced_subgraphs() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]).unwrap();
        let t = Theta::new(0.8, 0.4, 0.6, 0.3).unwrap();
        let mut solver = ExactSolver::new(&g).unwrap();
        solver.evaluate(&t);
        for (mask, value) in solver.memo().entries() {
            let mut active = crate::VertexSet::empty(5);
            for v in 0..5 {
                if mask & (1 << v) != 0 {
                    active.insert(v);
                }
            }
            let sub = g.induced(active).unwrap();
            let direct = exact_likelihood(&sub, &t).unwrap().log_value;
            assert_eq!(direct.to_bits(), value.to_bits());
            if sub.is_irreducible() {
                assert_eq!(value, 0.0);
            }
        }
    }

    #[test]
    fn warm_and_cold_memo_agree() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]).unwrap();
        let a = Theta::new(0.9, 0.3, 0.5, 0.2).unwrap();
        let b = Theta::new(0.6, 0.7, 0.2, 0.4).unwrap();
        let mut solver = ExactSolver::new(&g).unwrap();
        let cold = solver.evaluate(&a).log_value;
        let warm = solver.evaluate(&a).log_value;
        solver.evaluate(&b);
        let again = solver.evaluate(&a).log_value;
        assert_eq!(cold.to_bits(), warm.to_bits());
        assert_eq!(cold.to_bits(), again.to_bits());
    }

    #[test]
    fn terminal_states_are_recorded() {
        // A 5-cycle plus a twin of vertex 0: removing either twin leaves a
        // 5-cycle, so there are two terminal masks of the same size.
        let mut edges: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        edges.extend([(5, 1), (5, 4)]);
        let g = Graph::from_edges(6, &edges).unwrap();
        let r = exact_likelihood(&g, &theta0()).unwrap();
        assert_eq!(r.terminals.masks.len(), 2);
        assert_eq!(r.terminals.sizes.iter().copied().collect::<Vec<_>>(), vec![5]);
        assert!(!r.terminals.is_heterogeneous());
        assert!(r.log_value.is_finite());
    }
}
