//! Classical comparison nulls: the Newman–Girvan expectation and
//! degree-preserving link swaps with (RR1) and without (RR2) the single-link
//! restriction.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::{ModelTag, PairModel};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeLabel};

/// `e_ij = k_i k_j / (2L)` off the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct NgModel {
    degrees: Vec<usize>,
    links: usize,
}

impl NgModel {
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }
}

/// Builds the Newman–Girvan null, which is only admissible while
/// `k_max < √(2L)`.
pub fn newman_girvan(g: &Graph) -> Result<NgModel> {
    let links = g.edge_count();
    let limit = (2.0 * links as f64).sqrt();
    let k_max = g.max_degree();
    if links == 0 || k_max as f64 >= limit {
        return Err(Error::InfeasibleNg { k_max, limit });
    }
    Ok(NgModel { degrees: g.degrees(), links })
}

impl PairModel for NgModel {
    fn node_count(&self) -> usize {
        self.degrees.len()
    }

    fn link_count(&self) -> usize {
        self.links
    }

    fn target_degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    fn probability(&self, i: usize, j: usize) -> f64 {
        self.expected_links(i, j) / self.links as f64
    }

    fn expected_links(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        (self.degrees[i] * self.degrees[j]) as f64 / (2 * self.links) as f64
    }

    fn tag(&self) -> ModelTag {
        ModelTag::Ng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RrVariant {
    /// No self-loops, no multi-links.
    Rr1,
    /// No self-loops; multi-links allowed.
    Rr2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RrConfig {
    pub variant: RrVariant,
    /// Swap proposals; `None` means `20·L`.
    pub swap_attempts: Option<usize>,
    pub seed: u64,
}

impl RrConfig {
    pub fn new(variant: RrVariant, seed: u64) -> Self {
        RrConfig { variant, swap_attempts: None, seed }
    }
}

/// Undirected graph that may carry repeated links (never self-loops when
/// produced by [`rr_randomize`]).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGraph {
    labels: Vec<NodeLabel>,
    edges: Vec<(usize, usize)>,
}

impl MultiGraph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count()];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn has_self_loops(&self) -> bool {
        self.edges.iter().any(|&(u, v)| u == v)
    }

    /// Number of links that repeat an earlier one.
    pub fn multi_edge_count(&self) -> usize {
        let mut seen = HashMap::with_capacity(self.edges.len());
        self.edges
            .iter()
            .filter(|&&(u, v)| {
                let c = seen.entry((u.min(v), u.max(v))).or_insert(0);
                *c += 1;
                *c > 1
            })
            .count()
    }

    pub fn is_simple(&self) -> bool {
        !self.has_self_loops() && self.multi_edge_count() == 0
    }

    /// Converts to a [`Graph`], failing on self-loops or repeated links.
    pub fn to_graph(&self) -> Result<Graph> {
        Graph::with_labels(self.labels.clone(), &self.edges)
    }
}

impl From<&Graph> for MultiGraph {
    fn from(g: &Graph) -> Self {
        MultiGraph { labels: g.labels().to_vec(), edges: g.edges().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RrOutcome {
    pub graph: MultiGraph,
    pub attempted: usize,
    pub accepted: usize,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Degree-preserving randomisation by repeated double-edge swaps
/// `(a,b),(c,d) → (a,d),(c,b)`. Swaps that would create a forbidden
/// configuration for the variant are skipped.
pub fn rr_randomize(g: &Graph, cfg: &RrConfig) -> Result<RrOutcome> {
    let links = g.edge_count();
    if links < 2 {
        return Err(Error::Domain("link swapping needs at least two links".into()));
    }
    let attempts = cfg.swap_attempts.unwrap_or(20 * links);
    if attempts == 0 {
        return Err(Error::Domain("swap_attempts must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = g.edges().to_vec();
    let mut multiplicity: HashMap<(usize, usize), u32> = edges.iter().map(|&e| (e, 1)).collect();
    let mut accepted = 0;

    for _ in 0..attempts {
        let x = rng.gen_range(0..links);
        let y = rng.gen_range(0..links - 1);
        let y = if y >= x { y + 1 } else { y };
        let (a, b) = edges[x];
        let (mut c, mut d) = edges[y];
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b {
            continue;
        }
        let (first, second) = (key(a, d), key(c, b));
        if cfg.variant == RrVariant::Rr1
            && (first == second
                || multiplicity.get(&first).is_some_and(|&m| m > 0)
                || multiplicity.get(&second).is_some_and(|&m| m > 0))
        {
            continue;
        }
        for old in [key(a, b), key(c, d)] {
            if let Some(m) = multiplicity.get_mut(&old) {
                *m -= 1;
            }
        }
        *multiplicity.entry(first).or_insert(0) += 1;
        *multiplicity.entry(second).or_insert(0) += 1;
        edges[x] = first;
        edges[y] = second;
        accepted += 1;
    }

    Ok(RrOutcome {
        graph: MultiGraph { labels: g.labels().to_vec(), edges },
        attempted: attempts,
        accepted,
    })
}

/// Expected self-loop count `k² / (⟨k⟩ N)` for a node of degree `k` under
/// stub matching.
pub fn expected_self_loops(k: usize, mean_degree: f64, n: usize) -> Result<f64> {
    if n == 0 || !(mean_degree > 0.0) {
        return Err(Error::Domain("expected self-loops need N >= 1 and a positive mean degree".into()));
    }
    Ok((k * k) as f64 / (mean_degree * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    #[test]
    fn ng_on_triangles() {
        let k3 = load_edge_list("0 1\n1 2\n2 0").unwrap();
        let ng = newman_girvan(&k3).unwrap();
        assert_eq!(ng.expected_links(0, 1), 2.0 / 3.0);
        assert_eq!(ng.expected_links(1, 1), 0.0);

        let two = load_edge_list("0 1\n1 2\n2 0\n3 4\n4 5\n5 3").unwrap();
        let ng = newman_girvan(&two).unwrap();
        assert_eq!(ng.expected_links(0, 4), 1.0 / 3.0);
    }

    #[test]
    fn ng_rejects_big_hub() {
        let star = Graph::from_edges(11, &(1..11).map(|v| (0, v)).collect::<Vec<_>>()).unwrap();
        assert!(matches!(newman_girvan(&star), Err(Error::InfeasibleNg { k_max: 10, .. })));
    }

    #[test]
    fn ng_row_sums_keep_their_bias() {
        let g = load_edge_list("0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n0 3").unwrap();
        let ng = newman_girvan(&g).unwrap();
        let l2 = (2 * g.edge_count()) as f64;
        for i in 0..g.node_count() {
            let row: f64 = (0..g.node_count()).map(|j| ng.expected_links(i, j)).sum();
            let ki = g.degree(i) as f64;
            assert!((row - ki * (l2 - ki) / l2).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_cannot_be_rewired() {
        let k3 = load_edge_list("0 1\n1 2\n2 0").unwrap();
        let out = rr_randomize(&k3, &RrConfig::new(RrVariant::Rr1, 4)).unwrap();
        assert_eq!(out.accepted, 0);
        assert_eq!(out.graph.to_graph().unwrap().edge_count(), 3);
    }

    #[test]
    fn star_rr2_keeps_degrees() {
        let s = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let out = rr_randomize(&s, &RrConfig::new(RrVariant::Rr2, 9)).unwrap();
        assert_eq!(out.graph.degrees(), vec![3, 1, 1, 1]);
        assert!(!out.graph.has_self_loops());
    }

    #[test]
    fn rr2_can_create_multi_links() {
        let g = load_edge_list("0 1\n2 3\n0 2\n1 3\n0 3\n1 2").unwrap();
        let any_multi = (0..50).any(|seed| {
            rr_randomize(&g, &RrConfig::new(RrVariant::Rr2, seed)).unwrap().graph.multi_edge_count() > 0
        });
        assert!(any_multi);
    }

    #[test]
    fn self_loop_expectation() {
        assert!((expected_self_loops(2, 2.0, 3).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(expected_self_loops(0, 2.0, 3).unwrap(), 0.0);
        assert!(expected_self_loops(3, 3.0, 1_000_000).unwrap() < 1e-5);
        assert!(expected_self_loops(1, 0.0, 3).is_err());
    }
}
