//! Enumeration oracle.
//!
//! Sums the product of `ω / (current size)` over every valid removal
//! ordering, with each `ω` obtained by enumerating the forward DA outcomes
//! (parent, copied-link subset, parent link, rule) rather than from the
//! closed form used elsewhere. Exponential; only for small graphs.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::ln;
use crate::theta::Theta;

/// Largest graph the enumeration oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 9;

fn neighbor_mask(adj: &[u64], v: usize, mask: u64) -> u64 {
    adj[v] & mask
}

/// `x^k` by repeated multiplication, with `0^0 = 1`.
fn powi(x: f64, k: i32) -> f64 {
    (0..k).fold(1.0, |acc, _| acc * x)
}

/// All subsets of the set bits of `set`.
fn subsets(set: u64) -> impl Iterator<Item = u64> {
    let mut sub = set;
    let mut done = false;
    core::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = sub;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & set;
        }
        Some(out)
    })
}

/// Whether some forward step from `mask \ {v}` can produce `v` with its
/// neighborhood in `mask`.
fn producible(adj: &[u64], mask: u64, v: usize) -> bool {
    let target = neighbor_mask(adj, v, mask);
    let rest = mask & !(1u64 << v);
    let mut us = rest;
    while us != 0 {
        let u = us.trailing_zeros() as usize;
        us &= us - 1;
        let ubit = 1u64 << u;
        let nu = neighbor_mask(adj, u, rest);
        for copied in subsets(nu) {
            if copied == target || (copied | ubit) == target {
                return true;
            }
        }
        if target == 0 || target == ubit {
            return true;
        }
    }
    false
}

/// Forward probability that one DA step from `mask \ {v}` produces the new
/// vertex `v` with exactly its neighborhood in `mask`.
fn forward_probability(adj: &[u64], mask: u64, v: usize, theta: &Theta) -> f64 {
    let target = neighbor_mask(adj, v, mask);
    let rest = mask & !(1u64 << v);
    let m = rest.count_ones() as f64;
    let (pi, p, q, r) = (theta.pi(), theta.p(), theta.q(), theta.r());
    let mut total = 0.0;
    let mut us = rest;
    while us != 0 {
        let u = us.trailing_zeros() as usize;
        us &= us - 1;
        let ubit = 1u64 << u;
        let nu = neighbor_mask(adj, u, rest);
        let deg = nu.count_ones() as i32;
        let mut dup = 0.0;
        for copied in subsets(nu) {
            let k = copied.count_ones() as i32;
            let pattern = powi(p, k) * powi(1.0 - p, deg - k);
            if copied == target {
                dup += pattern * (1.0 - q);
            }
            if copied | ubit == target {
                dup += pattern * q;
            }
        }
        let mut att = 0.0;
        if target == 0 {
            att += 1.0 - r;
        }
        if target == ubit {
            att += r;
        }
        total += (pi * dup + (1.0 - pi) * att) / m;
    }
    total
}

struct Enumerator<'a> {
    adj: Vec<u64>,
    thetas: &'a [Theta],
    cache: HashMap<(u64, usize), Option<Vec<f64>>>,
    sums: Vec<f64>,
}

impl Enumerator<'_> {
    fn step_factors(&mut self, mask: u64, v: usize) -> Option<Vec<f64>> {
        if let Some(hit) = self.cache.get(&(mask, v)) {
            return hit.clone();
        }
        let size = mask.count_ones() as f64;
        let out = if mask.count_ones() >= 2 && producible(&self.adj, mask, v) {
            Some(
                self.thetas
                    .iter()
                    .map(|t| forward_probability(&self.adj, mask, v, t) / size)
                    .collect(),
            )
        } else {
            None
        };
        self.cache.insert((mask, v), out.clone());
        out
    }

    fn walk(&mut self, mask: u64, product: &[f64]) {
        let mut terminal = true;
        let mut vs = mask;
        while vs != 0 {
            let v = vs.trailing_zeros() as usize;
            vs &= vs - 1;
            if let Some(factors) = self.step_factors(mask, v) {
                terminal = false;
                let next: Vec<f64> = product.iter().zip(&factors).map(|(a, b)| a * b).collect();
                self.walk(mask & !(1u64 << v), &next);
            }
        }
        if terminal {
            for (s, p) in self.sums.iter_mut().zip(product) {
                *s += p;
            }
        }
    }
}

/// Log likelihoods of `g` at several parameter values by explicit
/// enumeration of removal orderings.
pub fn brute_force_likelihoods(g: &Graph, thetas: &[Theta]) -> Result<Vec<f64>> {
    let n = g.capacity();
    if n > BRUTE_FORCE_LIMIT || g.active_count() > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            what: "brute-force likelihood",
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let adj = (0..n).map(|v| g.neighbors(v).as_mask().unwrap_or(0)).collect();
    let mut e = Enumerator {
        adj,
        thetas,
        cache: HashMap::new(),
        sums: alloc::vec![0.0; thetas.len()],
    };
    let start = alloc::vec![1.0; thetas.len()];
    e.walk(g.mask().unwrap_or(0), &start);
    Ok(e.sums.into_iter().map(ln).collect())
}

/// Log likelihood of `g` by explicit enumeration of removal orderings.
pub fn brute_force_likelihood(g: &Graph, theta: &Theta) -> Result<f64> {
    Ok(brute_force_likelihoods(g, core::slice::from_ref(theta))?[0])
}

/// Every graph reachable in one forward DA step from `g` (new vertex labeled
/// `g.capacity()`), keyed by the new vertex's neighbor mask, with its
/// probability. Requires `g.capacity() < 64`.
pub fn forward_step_distribution(g: &Graph, theta: &Theta) -> Vec<(u64, f64)> {
    let n = g.capacity();
    assert!(n < 64);
    let mask = g.mask().unwrap_or(0);
    let m = mask.count_ones() as f64;
    let (pi, p, q, r) = (theta.pi(), theta.p(), theta.q(), theta.r());
    let mut out: HashMap<u64, f64> = HashMap::new();
    for u in g.active().iter() {
        let ubit = 1u64 << u;
        let nu = g.neighbors(u).as_mask().unwrap_or(0);
        let deg = nu.count_ones() as i32;
        for copied in subsets(nu) {
            let k = copied.count_ones() as i32;
            let pattern = powi(p, k) * powi(1.0 - p, deg - k);
            *out.entry(copied).or_default() += pi * pattern * (1.0 - q) / m;
            *out.entry(copied | ubit).or_default() += pi * pattern * q / m;
        }
        *out.entry(0).or_default() += (1.0 - pi) * (1.0 - r) / m;
        *out.entry(ubit).or_default() += (1.0 - pi) * r / m;
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort_unstable_by_key(|e| e.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_likelihood;
    use crate::graph::fixtures::*;
    use crate::math::exp;
    use crate::transition_weight;

    fn theta0() -> Theta {
        Theta::new(1.0, 0.66, 0.33, 0.0).unwrap()
    }

    #[test]
    fn path_value() {
        let v = exp(brute_force_likelihood(&path3(), &theta0()).unwrap());
        assert!((v - 0.060984).abs() < 1e-15);
    }

    #[test]
    fn single_node_is_one() {
        assert_eq!(brute_force_likelihood(&Graph::empty(1), &theta0()).unwrap(), 0.0);
    }

    #[test]
    fn capacity() {
        assert!(brute_force_likelihood(&Graph::empty(10), &theta0()).is_err());
    }

    #[test]
    fn forward_probability_matches_closed_form() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (1, 5), (2, 5)]).unwrap();
        let t = Theta::new(0.7, 0.35, 0.6, 0.45).unwrap();
        let mask = g.mask().unwrap();
        let adj: Vec<u64> = (0..6).map(|v| g.neighbors(v).as_mask().unwrap()).collect();
        for v in 0..6 {
            let forward = forward_probability(&adj, mask, v, &t);
            let closed = transition_weight(&g, v, &t).unwrap().value;
            assert!((forward - closed).abs() < 1e-15, "v={v}: {forward} vs {closed}");
            assert_eq!(producible(&adj, mask, v), g.is_removable(v));
        }
    }

    #[test]
    fn agrees_with_recursion_on_small_graphs() {
        let t = Theta::new(0.6, 0.4, 0.7, 0.2).unwrap();
        for g in [k3(), path3(), edge(), cycle(4), Graph::empty(3)] {
            let a = brute_force_likelihood(&g, &t).unwrap();
            let b = exact_likelihood(&g, &t).unwrap().log_value;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_step_sums_to_one() {
        let t = Theta::new(0.6, 0.4, 0.7, 0.2).unwrap();
        for g in [Graph::empty(1), edge(), path3(), k3(), cycle(4)] {
            let total: f64 = forward_step_distribution(&g, &t).iter().map(|e| e.1).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
