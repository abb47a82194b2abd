//! Community detection by recursive spectral bipartition of a modularity
//! matrix.
//!
//! Two matrices are supported. The standard one compares the adjacency
//! matrix with the expected links of a null, `M_ij = a_ij − e_ij`. The soft
//! one compares two ensembles and scales each pair by its combined standard
//! deviation, `M_ij = (e¹_ij − e²_ij) / √(s¹_ij + s²_ij)`.
//!
//! Modularity is summed over ordered pairs with a zero diagonal and no
//! `1/(2L)` normalisation, so `Q` here is twice the unordered-pair sum.

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::PairModel;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    Standard,
    Soft,
}

/// Dense symmetric matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularityMatrix {
    n: usize,
    data: Vec<f64>,
    kind: MatrixKind,
    clamped: usize,
}

impl ModularityMatrix {
    /// Wraps an explicit row-major matrix. The diagonal is forced to zero and
    /// the entries are symmetrised.
    pub fn from_dense(n: usize, mut data: Vec<f64>, kind: MatrixKind) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("modularity matrix entries must be finite".into()));
        }
        for i in 0..n {
            data[i * n + i] = 0.0;
            for j in i + 1..n {
                let v = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(ModularityMatrix { n, data, kind, clamped: 0 })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Pairs whose probability had to be clamped into `[0, 1]` before the
    /// variance was taken (soft matrices only).
    pub fn clamped_pairs(&self) -> usize {
        self.clamped
    }

    /// `Σ_{i≠j} M_ij`, the modularity of the single-community partition.
    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    fn build<F>(n: usize, kind: MatrixKind, entry: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { entry(i, j) }).collect())
            .collect();
        ModularityMatrix { n, data: rows.concat(), kind, clamped: 0 }
    }
}

/// `M_ij = a_ij − e_ij` with `e` symmetrised and the diagonal set to zero.
pub fn standard_modularity_matrix<M: PairModel>(g: &Graph, null: &M) -> Result<ModularityMatrix> {
    let n = g.node_count();
    if null.node_count() != n {
        return Err(Error::DimensionMismatch { expected: n, found: null.node_count() });
    }
    Ok(ModularityMatrix::build(n, MatrixKind::Standard, |i, j| {
        let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
        a - 0.5 * (null.expected_links(i, j) + null.expected_links(j, i))
    }))
}

fn clamped_variance(links: f64, p: f64) -> (f64, bool) {
    let q = p.clamp(0.0, 1.0);
    (links * q * (1.0 - q), q != p)
}

/// `M_ij = (e¹_ij − e²_ij) / √(s¹_ij + s²_ij)`; pairs with zero combined
/// variance get 0.
pub fn soft_modularity_matrix<A: PairModel, B: PairModel>(first: &A, second: &B) -> Result<ModularityMatrix> {
    let n = first.node_count();
    if second.node_count() != n {
        return Err(Error::DimensionMismatch { expected: n, found: second.node_count() });
    }
    if second.link_count() != first.link_count() {
        return Err(Error::DimensionMismatch { expected: first.link_count(), found: second.link_count() });
    }
    let l = first.link_count() as f64;
    let mut m = ModularityMatrix::build(n, MatrixKind::Soft, |i, j| {
        let (p1, p2) = (first.probability(i, j), second.probability(i, j));
        let (s1, _) = clamped_variance(l, p1);
        let (s2, _) = clamped_variance(l, p2);
        let s = s1 + s2;
        if s > 0.0 {
            (l * p1 - l * p2) / s.sqrt()
        } else {
            0.0
        }
    });
    let clamped = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            clamped_variance(l, first.probability(i, j)).1 || clamped_variance(l, second.probability(i, j)).1
        })
        .count();
    if clamped > 0 {
        info!("{clamped} pairs had p outside [0, 1]; clamped inside the variance");
    }
    m.clamped = clamped;
    Ok(m)
}

/// Community assignment with contiguous ids starting at 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Relabels arbitrary ids to `0..count` in order of first appearance.
    pub fn from_assignment(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment = raw
            .iter()
            .map(|&c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
            .collect();
        Partition { assignment, count: map.len() }
    }

    pub fn single(n: usize) -> Self {
        Partition { assignment: vec![0; n], count: usize::from(n > 0) }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    /// Members of each community, each sorted ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// `Q = Σ_{i,j: g_i = g_j} M_ij` over ordered pairs.
pub fn modularity_value(m: &ModularityMatrix, part: &Partition) -> Result<f64> {
    if part.node_count() != m.size() {
        return Err(Error::DimensionMismatch { expected: m.size(), found: part.node_count() });
    }
    let a = part.assignment();
    Ok((0..m.size())
        .map(|i| m.row(i).iter().zip(a).filter(|(_, &c)| c == a[i]).map(|(v, _)| v).sum::<f64>())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Leading eigenvalues at or below this count as "no split".
    pub eigen_epsilon: f64,
    /// Only accept splits that strictly increase `Q`.
    pub strict: bool,
    /// Fall back to a dense symmetric eigensolver when power iteration
    /// stalls on a near-degenerate leading pair. Without it the stall is an
    /// error.
    pub dense_fallback: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { tolerance: 1e-10, max_iterations: 100_000, eigen_epsilon: 1e-8, strict: false, dense_fallback: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bipartition {
    Split {
        positive: Vec<usize>,
        negative: Vec<usize>,
        eigenvalue: f64,
        /// Change in `Q` from splitting, `½ sᵀ B s`.
        q_contribution: f64,
    },
    Indivisible,
}

/// Generalised modularity matrix of a subset,
/// `B_ij = M_ij − δ_ij Σ_{l∈g} M_il`, as a dense row-major block.
fn restricted(m: &ModularityMatrix, subset: &[usize]) -> Vec<f64> {
    let k = subset.len();
    let mut b = vec![0.0; k * k];
    for (a, &i) in subset.iter().enumerate() {
        let row = m.row(i);
        let mut sum = 0.0;
        for (c, &j) in subset.iter().enumerate() {
            b[a * k + c] = row[j];
            sum += row[j];
        }
        b[a * k + a] -= sum;
    }
    b
}

fn mat_vec(b: &[f64], x: &[f64], out: &mut [f64]) {
    let k = x.len();
    for (a, o) in out.iter_mut().enumerate() {
        *o = b[a * k..(a + 1) * k].iter().zip(x).map(|(u, v)| u * v).sum();
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

// Starts are frac(s·(a+1)²). Linear sequences cancel on mirror-symmetric
// graphs (equal neighbour differences), which left the start exactly
// orthogonal to the leading eigenvector; the larger of two starts is kept.
const START_STRIDES: [f64; 2] = [0.618_033_988_749_895, 0.414_213_562_373_095_1];

/// Leading eigenpair of a symmetric `k × k` matrix by power iteration on
/// `B + sI`, `s` being the largest absolute row sum.
pub(crate) fn power_iteration(b: &[f64], k: usize, opts: &SpectralOptions) -> Result<(f64, Vec<f64>)> {
    let shift = (0..k).map(|a| b[a * k..(a + 1) * k].iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    if shift == 0.0 {
        return Ok((0.0, vec![0.0; k]));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for stride in START_STRIDES {
        let (lambda, x) = power_from(b, k, shift, stride, opts)?;
        if best.as_ref().map_or(true, |(l, _)| lambda > *l + opts.tolerance * shift) {
            best = Some((lambda, x));
        }
    }
    Ok(best.expect("at least one start"))
}

fn power_from(b: &[f64], k: usize, shift: f64, stride: f64, opts: &SpectralOptions) -> Result<(f64, Vec<f64>)> {
    // non-constant start (constant vectors lie in B's kernel)
    let mut x: Vec<f64> = (0..k).map(|a| ((a as f64 + 1.0).powi(2) * stride).fract() - 0.5).collect();
    let n0 = norm(&x);
    x.iter_mut().for_each(|v| *v /= n0);
    let mut y = vec![0.0; k];
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        mat_vec(b, &x, &mut y);
        let lambda: f64 = x.iter().zip(&y).map(|(u, v)| u * v).sum();
        residual = x.iter().zip(&y).map(|(u, v)| (v - lambda * u).powi(2)).sum::<f64>().sqrt();
        if residual <= opts.tolerance * shift {
            return Ok((lambda, x));
        }
        for (yv, xv) in y.iter_mut().zip(&x) {
            *yv += shift * xv;
        }
        let ny = norm(&y);
        if ny == 0.0 {
            return Ok((lambda, x));
        }
        for (xv, yv) in x.iter_mut().zip(&y) {
            *xv = yv / ny;
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual })
}

fn dense_leading_eigenpair(b: &[f64], k: usize) -> (f64, Vec<f64>) {
    let eig = nalgebra::DMatrix::from_row_slice(k, k, b).symmetric_eigen();
    let top = eig.eigenvalues.imax();
    (eig.eigenvalues[top], eig.eigenvectors.column(top).iter().copied().collect())
}

pub(crate) fn leading_eigenpair(b: &[f64], k: usize, opts: &SpectralOptions) -> Result<(f64, Vec<f64>)> {
    match power_iteration(b, k, opts) {
        Err(Error::NoConvergence { iterations, residual }) if opts.dense_fallback => {
            debug!("power iteration stalled after {iterations} steps (residual {residual:e}); using dense solver");
            Ok(dense_leading_eigenpair(b, k))
        }
        other => other,
    }
}

/// Splits `subset` by the signs of the leading eigenvector of its
/// generalised modularity matrix.
pub fn spectral_bipartition(m: &ModularityMatrix, subset: &[usize], opts: &SpectralOptions) -> Result<Bipartition> {
    let k = subset.len();
    if k < 2 {
        return Ok(Bipartition::Indivisible);
    }
    let b = restricted(m, subset);
    let (lambda, mut v) = leading_eigenpair(&b, k, opts)?;
    if lambda <= opts.eigen_epsilon {
        return Ok(Bipartition::Indivisible);
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12).copied() {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let signs: Vec<f64> = v.iter().map(|&x| if x > 0.0 { 1.0 } else { -1.0 }).collect();
    let positive: Vec<usize> = subset.iter().zip(&signs).filter(|(_, &s)| s > 0.0).map(|(&i, _)| i).collect();
    let negative: Vec<usize> = subset.iter().zip(&signs).filter(|(_, &s)| s < 0.0).map(|(&i, _)| i).collect();
    if positive.is_empty() || negative.is_empty() {
        return Ok(Bipartition::Indivisible);
    }
    let mut bs = vec![0.0; k];
    mat_vec(&b, &signs, &mut bs);
    let q_contribution = 0.5 * signs.iter().zip(&bs).map(|(s, t)| s * t).sum::<f64>();
    if opts.strict && q_contribution <= 0.0 {
        return Ok(Bipartition::Indivisible);
    }
    Ok(Bipartition::Split {
        positive,
        negative,
        eigenvalue: lambda,
        q_contribution,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DendrogramNode {
    Leaf {
        members: Vec<usize>,
        community: usize,
    },
    Split {
        members: Vec<usize>,
        eigenvalue: f64,
        q_contribution: f64,
        positive: Box<DendrogramNode>,
        negative: Box<DendrogramNode>,
    },
}

impl DendrogramNode {
    pub fn members(&self) -> &[usize] {
        match self {
            DendrogramNode::Leaf { members, .. } | DendrogramNode::Split { members, .. } => members,
        }
    }

    fn visit<'a>(&'a self, out: &mut Vec<&'a DendrogramNode>) {
        out.push(self);
        if let DendrogramNode::Split { positive, negative, .. } = self {
            positive.visit(out);
            negative.visit(out);
        }
    }

    fn best_gain(&self) -> f64 {
        match self {
            DendrogramNode::Leaf { .. } => 0.0,
            DendrogramNode::Split { q_contribution, positive, negative, .. } => {
                (q_contribution + positive.best_gain() + negative.best_gain()).max(0.0)
            }
        }
    }
}

/// Binary record of the recursive bipartition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub root: DendrogramNode,
    /// `Q` of the single-community partition.
    pub base_q: f64,
}

impl Dendrogram {
    /// Every node in depth-first order, positive branch first.
    pub fn nodes(&self) -> Vec<&DendrogramNode> {
        let mut out = Vec::new();
        self.root.visit(&mut out);
        out
    }

    /// `Q` contributions of the accepted splits in depth-first order.
    pub fn split_contributions(&self) -> Vec<f64> {
        self.nodes()
            .into_iter()
            .filter_map(|n| match n {
                DendrogramNode::Split { q_contribution, .. } => Some(*q_contribution),
                DendrogramNode::Leaf { .. } => None,
            })
            .collect()
    }

    /// `Q` of the final (leaf) partition.
    pub fn leaf_q(&self) -> f64 {
        self.base_q + self.split_contributions().iter().sum::<f64>()
    }

    /// Largest `Q` over all partitions obtainable by cutting the tree, i.e.
    /// keeping any ancestor-closed subset of the splits.
    pub fn best_cut_q(&self) -> f64 {
        self.base_q + self.root.best_gain()
    }
}

fn split_recursively(m: &ModularityMatrix, subset: Vec<usize>, opts: &SpectralOptions) -> Result<DendrogramNode> {
    match spectral_bipartition(m, &subset, opts)? {
        Bipartition::Indivisible => Ok(DendrogramNode::Leaf { members: subset, community: 0 }),
        Bipartition::Split { positive, negative, eigenvalue, q_contribution } => {
            debug!("split {} nodes -> {} + {} (dQ = {q_contribution})", subset.len(), positive.len(), negative.len());
            let (p, n) = rayon::join(
                || split_recursively(m, positive, opts),
                || split_recursively(m, negative, opts),
            );
            Ok(DendrogramNode::Split {
                members: subset,
                eigenvalue,
                q_contribution,
                positive: Box::new(p?),
                negative: Box::new(n?),
            })
        }
    }
}

fn number_leaves(node: &mut DendrogramNode, next: &mut usize, assignment: &mut [usize]) {
    match node {
        DendrogramNode::Leaf { members, community } => {
            *community = *next;
            for &v in members.iter() {
                assignment[v] = *next;
            }
            *next += 1;
        }
        DendrogramNode::Split { positive, negative, .. } => {
            number_leaves(positive, next, assignment);
            number_leaves(negative, next, assignment);
        }
    }
}

/// Bipartitions until every part is indivisible, whether or not each split
/// raises `Q` (unless `opts.strict`).
pub fn recursive_partition(m: &ModularityMatrix, opts: &SpectralOptions) -> Result<(Dendrogram, Partition)> {
    let n = m.size();
    let mut root = split_recursively(m, (0..n).collect(), opts)?;
    let mut assignment = vec![0; n];
    let mut next = 0;
    number_leaves(&mut root, &mut next, &mut assignment);
    let partition = Partition { assignment, count: next };
    Ok((Dendrogram { root, base_q: m.total() }, partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::newman_girvan;
    use crate::ensemble::GraphEnsemble;
    use crate::graph::{load_edge_list, rank_nodes, TiePolicy};

    fn two_triangles() -> (Graph, ModularityMatrix) {
        let g = load_edge_list("0 1\n1 2\n2 0\n3 4\n4 5\n5 3").unwrap();
        let m = standard_modularity_matrix(&g, &newman_girvan(&g).unwrap()).unwrap();
        (g, m)
    }

    #[test]
    fn two_triangle_entries_and_q() {
        let (_, m) = two_triangles();
        assert!((m.get(0, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.get(0, 3) + 1.0 / 3.0).abs() < 1e-15);
        let split = Partition::from_assignment(&[0, 0, 0, 1, 1, 1]);
        assert!((modularity_value(&m, &split).unwrap() - 8.0).abs() < 1e-12);
        assert!((modularity_value(&m, &Partition::single(6)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_triangles_split_cleanly() {
        let (_, m) = two_triangles();
        let (dendrogram, part) = recursive_partition(&m, &SpectralOptions::default()).unwrap();
        assert_eq!(part.community_count(), 2);
        assert_eq!(part.communities(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert!((dendrogram.leaf_q() - 8.0).abs() < 1e-9);
    }

    #[test]
    fn zero_matrix_is_indivisible() {
        let m = ModularityMatrix::from_dense(4, vec![0.0; 16], MatrixKind::Soft).unwrap();
        let (d, part) = recursive_partition(&m, &SpectralOptions::default()).unwrap();
        assert_eq!(part.community_count(), 1);
        assert!(matches!(d.root, DendrogramNode::Leaf { .. }));
        assert_eq!(spectral_bipartition(&m, &[2], &SpectralOptions::default()).unwrap(), Bipartition::Indivisible);
    }

    #[test]
    fn exact_model_gives_zero_matrix() {
        let g = load_edge_list("0 1\n1 2\n2 0").unwrap();
        let e = GraphEnsemble::observed(&g, rank_nodes(&g, TiePolicy::ById)).unwrap();
        let m = standard_modularity_matrix(&g, &e).unwrap();
        assert!(m.data.iter().all(|v| v.abs() < 1e-12));
        let (_, part) = recursive_partition(&m, &SpectralOptions::default()).unwrap();
        assert_eq!(part.community_count(), 1);
    }

    #[test]
    fn soft_matrix_of_identical_models_vanishes() {
        let g = load_edge_list("0 1\n0 2\n0 3\n1 2\n3 4\n2 4").unwrap();
        let e = GraphEnsemble::observed(&g, rank_nodes(&g, TiePolicy::ById)).unwrap();
        let m = soft_modularity_matrix(&e, &e).unwrap();
        assert!(m.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn partition_relabels_contiguously() {
        let p = Partition::from_assignment(&[7, 7, 3, 9, 3]);
        assert_eq!(p.assignment(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.community_count(), 3);
    }

    #[test]
    fn mismatched_sizes() {
        let (_, m) = two_triangles();
        assert!(modularity_value(&m, &Partition::single(5)).is_err());
        assert!(ModularityMatrix::from_dense(2, vec![0.0; 3], MatrixKind::Soft).is_err());
    }

    #[test]
    fn best_cut_accounts_for_negative_splits() {
        let leaf = |c| Box::new(DendrogramNode::Leaf { members: vec![c], community: c });
        let root = DendrogramNode::Split {
            members: vec![0, 1, 2],
            eigenvalue: 1.0,
            q_contribution: 3.0,
            positive: Box::new(DendrogramNode::Split {
                members: vec![0, 1],
                eigenvalue: 0.5,
                q_contribution: -1.0,
                positive: leaf(0),
                negative: leaf(1),
            }),
            negative: leaf(2),
        };
        let d = Dendrogram { root, base_q: 1.0 };
        assert_eq!(d.leaf_q(), 3.0);
        assert_eq!(d.best_cut_q(), 4.0);
    }
}
