//! Simple undirected graphs, degree rankings and the rich-club sequence.
//!
//! Nodes carry their original label from the input file but are addressed by
//! a contiguous index `0..N`. Indices are assigned in ascending label order,
//! so "ascending original id" and "ascending index" coincide.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Original identifier of a node as it appeared in the input.
///
/// Integer labels sort numerically and before any text label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeLabel {
    Int(u64),
    Text(String),
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeLabel::Int(v) => write!(f, "{v}"),
            NodeLabel::Text(s) => f.write_str(s),
        }
    }
}

/// How tokens in an edge list are turned into node labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelPolicy {
    /// Every token must be a non-negative integer.
    #[default]
    Integer,
    /// Integers are kept as integers, anything else becomes a text label.
    Mixed,
}

/// Undirected simple graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<NodeLabel>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph over nodes labelled `0..n` from index pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..n as u64).map(NodeLabel::Int).collect();
        Self::with_labels(labels, edges)
    }

    /// Builds a graph from explicit labels and index pairs. Line numbers in
    /// errors refer to the position in `edges`, counted from 1.
    pub fn with_labels(labels: Vec<NodeLabel>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        let mut stored = Vec::with_capacity(edges.len());
        for (pos, &(u, v)) in edges.iter().enumerate() {
            let line = pos + 1;
            if u >= n || v >= n {
                return Err(Error::Parse {
                    line,
                    message: format!("node index out of range 0..{n}"),
                });
            }
            if u == v {
                return Err(Error::SelfLoop { line, node: labels[u].to_string() });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge {
                    line,
                    u: labels[u].to_string(),
                    v: labels[v].to_string(),
                });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            stored.push(key);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph { labels, adjacency, edges: stored })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` index pairs with `u < v`, in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, node: usize) -> &NodeLabel {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }
}

/// Parses a whitespace separated edge list with integer node ids.
///
/// Lines starting with `#` and blank lines are skipped. Self-loops, duplicate
/// edges and malformed lines are rejected with their 1-based line number.
///
/// ```
/// let g = richclub::graph::load_edge_list("0 1\n1 2\n2 0").unwrap();
/// assert_eq!((g.node_count(), g.edge_count()), (3, 3));
/// ```
pub fn load_edge_list(text: &str) -> Result<Graph> {
    load_edge_list_with(text, LabelPolicy::Integer)
}

pub fn load_edge_list_with(text: &str, policy: LabelPolicy) -> Result<Graph> {
    let mut raw: Vec<(usize, NodeLabel, NodeLabel)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse { line: line_no, message: "expected two node ids".into() });
        };
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "expected exactly two node ids".into(),
            });
        }
        raw.push((line_no, parse_label(a, policy, line_no)?, parse_label(b, policy, line_no)?));
    }

    let distinct: BTreeSet<&NodeLabel> = raw.iter().flat_map(|(_, a, b)| [a, b]).collect();
    let labels: Vec<NodeLabel> = distinct.into_iter().cloned().collect();
    let index_of = |l: &NodeLabel| labels.binary_search(l).expect("label collected above");

    let n = labels.len();
    let mut adjacency = vec![Vec::new(); n];
    let mut seen = HashSet::with_capacity(raw.len());
    let mut edges = Vec::with_capacity(raw.len());
    for (line, a, b) in &raw {
        if a == b {
            return Err(Error::SelfLoop { line: *line, node: a.to_string() });
        }
        let (u, v) = (index_of(a), index_of(b));
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(Error::DuplicateEdge { line: *line, u: a.to_string(), v: b.to_string() });
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
        edges.push(key);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(Graph { labels, adjacency, edges })
}

fn parse_label(token: &str, policy: LabelPolicy, line: usize) -> Result<NodeLabel> {
    match (u64::from_str(token), policy) {
        (Ok(v), _) => Ok(NodeLabel::Int(v)),
        (Err(_), LabelPolicy::Mixed) => Ok(NodeLabel::Text(token.to_string())),
        (Err(_), LabelPolicy::Integer) => Err(Error::Parse {
            line,
            message: format!("node id {token:?} is not a non-negative integer"),
        }),
    }
}

/// Tie-breaking rule for nodes of equal degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiePolicy {
    /// Ascending original id.
    ById,
    /// Equal-degree blocks shuffled by a generator seeded with the value.
    Seeded(u64),
}

/// Nodes in decreasing degree order. Rank `r` (0-based here, 1-based in
/// reports) holds node `order[r]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    order: Vec<usize>,
    rank_of: Vec<usize>,
    policy: TiePolicy,
}

impl Ranking {
    /// Builds a ranking from an explicit permutation, checking it against `g`.
    pub fn from_order(g: &Graph, order: Vec<usize>) -> Result<Self> {
        let n = g.node_count();
        if order.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: order.len() });
        }
        let mut rank_of = vec![usize::MAX; n];
        for (rank, &node) in order.iter().enumerate() {
            if node >= n || rank_of[node] != usize::MAX {
                return Err(Error::Domain("ranking is not a permutation of the nodes".into()));
            }
            rank_of[node] = rank;
        }
        if order.windows(2).any(|w| g.degree(w[0]) < g.degree(w[1])) {
            return Err(Error::Domain("degrees must be nonincreasing along the ranking".into()));
        }
        Ok(Ranking { order, rank_of, policy: TiePolicy::ById })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Node at 0-based rank `rank`.
    pub fn node(&self, rank: usize) -> usize {
        self.order[rank]
    }

    /// 0-based rank of `node`.
    pub fn rank_of(&self, node: usize) -> usize {
        self.rank_of[node]
    }

    pub fn policy(&self) -> TiePolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Degrees read along the ranking (nonincreasing).
    pub fn ranked_degrees(&self, g: &Graph) -> Vec<usize> {
        self.order.iter().map(|&v| g.degree(v)).collect()
    }
}

/// Ranks nodes by decreasing degree.
pub fn rank_nodes(g: &Graph, policy: TiePolicy) -> Ranking {
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ascending index (= ascending label) among ties
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    if let TiePolicy::Seeded(seed) = policy {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut start = 0;
        while start < n {
            let d = g.degree(order[start]);
            let end = start + order[start..].iter().take_while(|&&v| g.degree(v) == d).count();
            order[start..end].shuffle(&mut rng);
            start = end;
        }
    }
    let mut rank_of = vec![0; n];
    for (rank, &node) in order.iter().enumerate() {
        rank_of[node] = rank;
    }
    Ranking { order, rank_of, policy }
}

/// Which family a k⁺ sequence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KPlusMode {
    /// Read off a concrete graph.
    Observed,
    /// Optimised with the single-link bound `k⁺_r ≤ r − 1`.
    Me2,
    /// Optimised with only `k⁺_r ≤ k_r`.
    Me3,
}

/// Per-rank count of links to strictly higher-ranked nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KPlusSequence {
    values: Vec<usize>,
    mode: KPlusMode,
}

impl KPlusSequence {
    /// Wraps raw values after checking the invariants shared by every mode
    /// against the ranked degree sequence `degrees`.
    pub fn new(values: Vec<usize>, degrees: &[usize], mode: KPlusMode) -> Result<Self> {
        if values.len() != degrees.len() {
            return Err(Error::DimensionMismatch { expected: degrees.len(), found: values.len() });
        }
        if values.first().is_some_and(|&v| v != 0) {
            return Err(Error::Domain("k+ at rank 1 must be 0".into()));
        }
        if let Some(r) = values.iter().zip(degrees).position(|(kp, k)| kp > k) {
            return Err(Error::Domain(format!("k+ exceeds degree at rank {}", r + 1)));
        }
        let total: usize = values.iter().sum();
        let degree_sum: usize = degrees.iter().sum();
        if 2 * total != degree_sum {
            return Err(Error::Domain(format!(
                "k+ sums to {total} but the degree sequence has {} links",
                degree_sum as f64 / 2.0
            )));
        }
        if mode == KPlusMode::Me2 {
            if let Some(r) = values.iter().enumerate().position(|(r, &kp)| kp > r) {
                return Err(Error::Domain(format!("k+ exceeds r - 1 at rank {}", r + 1)));
            }
        }
        Ok(KPlusSequence { values, mode })
    }

    pub(crate) fn from_raw(values: Vec<usize>, mode: KPlusMode) -> Self {
        KPlusSequence { values, mode }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn mode(&self) -> KPlusMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> usize {
        self.values.iter().sum()
    }
}

/// Counts, for every rank, the neighbours that sit at a strictly higher rank.
pub fn kplus_from_graph(g: &Graph, ranking: &Ranking) -> KPlusSequence {
    let values = ranking
        .order()
        .iter()
        .enumerate()
        .map(|(r, &node)| g.neighbors(node).iter().filter(|&&nb| ranking.rank_of(nb) < r).count())
        .collect();
    KPlusSequence::from_raw(values, KPlusMode::Observed)
}

/// Rank-based rich-club coefficient `Φ_r = 2/(r(r−1)) Σ_{i≤r} k⁺_i` with
/// `r` counted from 1.
pub fn rich_club_coefficient(kp: &KPlusSequence, r: usize) -> Result<f64> {
    if r < 2 || r > kp.len() {
        return Err(Error::Domain(format!("rich-club rank must lie in 2..={}, got {r}", kp.len())));
    }
    let links: usize = kp.values()[..r].iter().sum();
    Ok(2.0 * links as f64 / (r * (r - 1)) as f64)
}

/// `√(2L)`, the degree above which single links force degree correlations.
pub fn cutoff_degree(g: &Graph) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::Domain("cut-off degree needs at least one link".into()));
    }
    Ok((2.0 * g.edge_count() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star3() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn triangle_parses() {
        let g = load_edge_list("0 1\n1 2\n2 0").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(2, 0) && g.has_edge(0, 2));
    }

    #[test]
    fn comments_blanks_and_labels() {
        let g = load_edge_list("# header\n\n10 7\n   \n7 3 \n").unwrap();
        let labels: Vec<_> = g.labels().iter().map(ToString::to_string).collect();
        assert_eq!(labels, ["3", "7", "10"]);
        assert!(g.has_edge(1, 2));
    }

    #[test]
    fn self_loop_reports_line() {
        assert_eq!(load_edge_list("0 0"), Err(Error::SelfLoop { line: 1, node: "0".into() }));
        assert!(matches!(load_edge_list("# c\n1 2\n3 3"), Err(Error::SelfLoop { line: 3, .. })));
    }

    #[test]
    fn duplicate_edge_reports_line() {
        assert!(matches!(load_edge_list("0 1\n1 0"), Err(Error::DuplicateEdge { line: 2, .. })));
    }

    #[test]
    fn bad_tokens() {
        assert!(matches!(load_edge_list("0 x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load_edge_list("0 -1"), Err(Error::Parse { .. })));
        assert!(matches!(load_edge_list("0"), Err(Error::Parse { .. })));
        assert!(matches!(load_edge_list("0 1 2"), Err(Error::Parse { .. })));
    }

    #[test]
    fn mixed_labels() {
        let g = load_edge_list_with("JFK LAX\nLAX 3", LabelPolicy::Mixed).unwrap();
        assert_eq!(g.label(0), &NodeLabel::Int(3));
        assert_eq!(g.label(1).to_string(), "JFK");
    }

    #[test]
    fn star_ranking_puts_hub_first() {
        let g = Graph::from_edges(4, &[(3, 1), (3, 0), (3, 2)]).unwrap();
        let r = rank_nodes(&g, TiePolicy::ById);
        assert_eq!(r.order(), &[3, 0, 1, 2]);
        assert_eq!(kplus_from_graph(&g, &r).values(), &[0, 1, 1, 1]);
    }

    #[test]
    fn seeded_ranking_only_permutes_ties() {
        let g = load_edge_list("0 1\n1 2\n2 0").unwrap();
        for seed in 0..20 {
            let r = rank_nodes(&g, TiePolicy::Seeded(seed));
            let mut sorted = r.order().to_vec();
            sorted.sort();
            assert_eq!(sorted, [0, 1, 2]);
            assert_eq!(r, rank_nodes(&g, TiePolicy::Seeded(seed)));
        }
    }

    #[test]
    fn kplus_small_graphs() {
        let k3 = load_edge_list("0 1\n1 2\n2 0").unwrap();
        let r = rank_nodes(&k3, TiePolicy::ById);
        assert_eq!(kplus_from_graph(&k3, &r).values(), &[0, 1, 2]);

        let p3 = load_edge_list("0 1\n1 2").unwrap();
        let r = rank_nodes(&p3, TiePolicy::ById);
        assert_eq!(r.node(0), 1);
        assert_eq!(kplus_from_graph(&p3, &r).values(), &[0, 1, 1]);
    }

    #[test]
    fn rich_club_values() {
        let k3 = load_edge_list("0 1\n1 2\n2 0").unwrap();
        let kp = kplus_from_graph(&k3, &rank_nodes(&k3, TiePolicy::ById));
        assert_eq!(rich_club_coefficient(&kp, 3).unwrap(), 1.0);

        let s = star3();
        let kp = kplus_from_graph(&s, &rank_nodes(&s, TiePolicy::ById));
        assert_eq!(rich_club_coefficient(&kp, 2).unwrap(), 1.0);
        assert_eq!(rich_club_coefficient(&kp, 4).unwrap(), 0.5);
        assert!(rich_club_coefficient(&kp, 1).is_err());
        assert!(rich_club_coefficient(&kp, 5).is_err());
    }

    #[test]
    fn cutoff_values() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(cutoff_degree(&path).unwrap(), 2.0);
        assert!(cutoff_degree(&Graph::from_edges(2, &[]).unwrap()).is_err());
    }

    #[test]
    fn kplus_sequence_validation() {
        let k = [2, 2, 2];
        assert!(KPlusSequence::new(vec![0, 1, 2], &k, KPlusMode::Me2).is_ok());
        assert!(KPlusSequence::new(vec![1, 1, 1], &k, KPlusMode::Me3).is_err());
        assert!(KPlusSequence::new(vec![0, 2, 1], &k, KPlusMode::Me2).is_err());
        assert!(KPlusSequence::new(vec![0, 2, 1], &k, KPlusMode::Me3).is_ok());
        assert!(KPlusSequence::new(vec![0, 1, 1], &k, KPlusMode::Me3).is_err());
    }
}
