use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::{exp, ln, ln_pow, log_add_exp, LogSum};
use crate::theta::Theta;

/// Precomputed logarithms of the parameters and their complements.
#[derive(Debug, Clone, Copy)]
pub struct LogTheta {
    pi: f64,
    not_pi: f64,
    p: f64,
    not_p: f64,
    q: f64,
    not_q: f64,
    r: f64,
    not_r: f64,
}

impl LogTheta {
    pub fn new(theta: &Theta) -> Self {
        Self {
            pi: ln(theta.pi()),
            not_pi: ln(1.0 - theta.pi()),
            p: ln(theta.p()),
            not_p: ln(1.0 - theta.p()),
            q: ln(theta.q()),
            not_q: ln(1.0 - theta.q()),
            r: ln(theta.r()),
            not_r: ln(1.0 - theta.r()),
        }
    }
}

impl From<&Theta> for LogTheta {
    fn from(theta: &Theta) -> Self {
        Self::new(theta)
    }
}

/// How a removable vertex `v` relates to one candidate parent `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ParentStat {
    /// `|N(v) \ {u}|`: parent links that were copied.
    pub copied: u32,
    /// `|N(u) \ {v}| - copied`: parent links that were not copied.
    pub dropped: u32,
    /// Whether `v` is linked to `u`.
    pub linked: bool,
    /// Whether `N(v) ⊆ {u}`, so the attachment rule can also produce `v`.
    pub attach: bool,
}

impl ParentStat {
    /// Log probability that duplicating or attaching to `u` yields exactly
    /// the neighborhood of `v`.
    #[inline]
    pub fn log_term(&self, lt: &LogTheta) -> f64 {
        let dup = lt.pi
            + ln_pow(lt.p, self.copied)
            + ln_pow(lt.not_p, self.dropped)
            + if self.linked { lt.q } else { lt.not_q };
        if self.attach {
            let att = lt.not_pi + if self.linked { lt.r } else { lt.not_r };
            log_add_exp(dup, att)
        } else {
            dup
        }
    }
}

/// `ln ω` from the parent statistics of a vertex in a graph with
/// `n_active` active vertices. `-inf` when there are no parents.
pub(crate) fn log_omega(stats: &[ParentStat], n_active: usize, lt: &LogTheta) -> f64 {
    if stats.is_empty() {
        return f64::NEG_INFINITY;
    }
    let mut acc = LogSum::new();
    for s in stats {
        acc.add(s.log_term(lt));
    }
    acc.value() - ln((n_active - 1) as f64)
}

#[inline]
fn stat(g: &Graph, v: usize, u: usize, deg_v: u32) -> ParentStat {
    let linked = g.row(v)[u / 64] & (1u64 << (u % 64)) != 0;
    let copied = deg_v - u32::from(linked);
    let deg_u = g
        .row(u)
        .iter()
        .zip(g.active().words())
        .map(|(a, b)| (a & b).count_ones())
        .sum::<u32>();
    let dropped = deg_u - u32::from(linked) - copied;
    ParentStat {
        copied,
        dropped,
        linked,
        attach: copied == 0,
    }
}

/// Pushes the parent statistics of `v` onto `out`, in ascending parent label
/// order. Returns how many were pushed.
pub(crate) fn parent_stats_into(g: &Graph, v: usize, out: &mut Vec<ParentStat>) -> usize {
    let deg_v = g.degree(v) as u32;
    let before = out.len();
    for u in g.active().iter() {
        if u != v && g.can_copy(v, u) {
            out.push(stat(g, v, u, deg_v));
        }
    }
    out.len() - before
}

/// Removable vertices of one reduced state together with their parent
/// statistics.
#[derive(Debug, Default, Clone)]
pub(crate) struct RemovalScan {
    vertices: Vec<usize>,
    offsets: Vec<usize>,
    stats: Vec<ParentStat>,
    n_active: usize,
}

impl RemovalScan {
    pub fn new(g: &Graph) -> Self {
        let mut scan = Self::default();
        scan.fill(g);
        scan
    }

    pub fn fill(&mut self, g: &Graph) {
        self.vertices.clear();
        self.offsets.clear();
        self.stats.clear();
        self.offsets.push(0);
        self.n_active = g.active_count();
        for v in g.active().iter() {
            if parent_stats_into(g, v, &mut self.stats) > 0 {
                self.vertices.push(v);
                self.offsets.push(self.stats.len());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> usize {
        self.vertices[i]
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn n_active(&self) -> usize {
        self.n_active
    }

    pub fn parents(&self, i: usize) -> &[ParentStat] {
        &self.stats[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn log_weight(&self, i: usize, lt: &LogTheta) -> f64 {
        log_omega(self.parents(i), self.n_active, lt)
    }
}

/// A transition probability `ω = P(G | G - v)` in linear and log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionWeight {
    pub value: f64,
    pub log: f64,
}

/// Log transition weight of removing `v`, `-inf` if `v` is not removable.
pub(crate) fn log_transition_weight(g: &Graph, v: usize, lt: &LogTheta) -> f64 {
    let mut stats = Vec::new();
    parent_stats_into(g, v, &mut stats);
    log_omega(&stats, g.active_count(), lt)
}

/// Probability that one DA step applied to `g - v` produces `g`, with the new
/// vertex labeled `v`.
///
/// Sums over candidate parents `u` the uniform parent choice `1/(n-1)` times
/// the chance that duplication (`π p^c (1-p)^d q^e (1-q)^(1-e)`) or, when
/// `N(v) ⊆ {u}`, attachment (`(1-π) r^e (1-r)^(1-e)`) reproduces `N(v)`.
/// Zero for vertices that are not removable.
pub fn transition_weight(g: &Graph, v: usize, theta: &Theta) -> Result<TransitionWeight> {
    if !g.is_active(v) {
        return Err(Error::InactiveVertex(v));
    }
    let n = g.active_count();
    if n < 2 {
        return Err(Error::TooFewVertices(n));
    }
    let log = log_transition_weight(g, v, &LogTheta::new(theta));
    Ok(TransitionWeight { value: exp(log), log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn theta(pi: f64, p: f64, q: f64, r: f64) -> Theta {
        Theta::new(pi, p, q, r).unwrap()
    }

    #[test]
    fn edge_graph_weight() {
        let t = theta(0.7, 0.2, 0.4, 0.9);
        for v in 0..2 {
            let w = transition_weight(&edge(), v, &t).unwrap();
            assert!((w.value - (0.7 * 0.4 + 0.3 * 0.9)).abs() < 1e-15);
        }
        let w = transition_weight(&edge(), 0, &theta(1.0, 0.66, 0.33, 0.0)).unwrap();
        assert!((w.value - 0.33).abs() < 1e-15);
    }

    #[test]
    fn triangle_weight() {
        let t = theta(1.0, 0.66, 0.33, 0.0);
        for v in 0..3 {
            let w = transition_weight(&k3(), v, &t).unwrap();
            assert!((w.value - 0.2178).abs() < 1e-15, "{}", w.value);
        }
    }

    #[test]
    fn path_weights() {
        let t = theta(1.0, 0.66, 0.33, 0.0);
        assert_eq!(transition_weight(&path3(), 1, &t).unwrap().value, 0.0);
        assert_eq!(transition_weight(&path3(), 1, &t).unwrap().log, f64::NEG_INFINITY);
        let leaf = transition_weight(&path3(), 0, &t).unwrap().value;
        assert!((leaf - 0.5 * (0.34 * 0.33 + 0.66 * 0.67)).abs() < 1e-15);
    }

    #[test]
    fn single_vertex_is_error() {
        let t = theta(1.0, 0.5, 0.5, 0.5);
        assert_eq!(
            transition_weight(&Graph::empty(1), 0, &t),
            Err(Error::TooFewVertices(1))
        );
    }

    #[test]
    fn boundary_gives_zero_not_nan() {
        let t = theta(1.0, 1.0, 1.0, 0.0);
        let w = transition_weight(&path3(), 0, &t).unwrap();
        assert_eq!(w.value, 0.0);
        assert!(!w.log.is_nan());
        let t = theta(1.0, 0.0, 0.0, 0.0);
        let w = transition_weight(&Graph::empty(3), 0, &t).unwrap();
        assert!((w.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scan_agrees_with_single_vertex_weights() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        let t = theta(0.8, 0.3, 0.6, 0.2);
        let lt = LogTheta::new(&t);
        let scan = RemovalScan::new(&g);
        assert_eq!(scan.vertices(), g.removable_set().to_vec().as_slice());
        for i in 0..scan.len() {
            let v = scan.vertex(i);
            assert_eq!(
                scan.log_weight(i, &lt).to_bits(),
                log_transition_weight(&g, v, &lt).to_bits()
            );
        }
    }
}
