//! Maximal-entropy ensembles constrained by the degree sequence `{k_r}` and
//! the rich-club sequence `{k⁺_r}`.
//!
//! Ranks are 0-based throughout the API. With `F(i) = w(i)(k_i − k⁺_i)` and
//! `G(j) = Σ_{n<j} F(n)`, the link probability for `i < j` is
//!
//! ```text
//! p(i, j) = F(i) / G(j) · k⁺_j / L
//! ```
//!
//! and the weights follow `w(0) = 1`,
//! `w(m) = w(m−1) G(m) / (G(m) − k⁺_m w(m−1))`.
//!
//! Nothing of size `N²` is stored: each probability is an `O(1)` lookup into
//! the `F` and `G` arrays.
//!
//! Nodes of degree zero sit at the tail of any ranking. They take no part in
//! the recursion and every probability that touches them is zero.

use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{kplus_from_graph, Graph, KPlusMode, KPlusSequence, Ranking};

/// Model family, used for labelling outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelTag {
    #[serde(rename = "ME1")]
    Me1,
    #[serde(rename = "ME2")]
    Me2,
    #[serde(rename = "ME3")]
    Me3,
    #[serde(rename = "NG")]
    Ng,
}

impl ModelTag {
    pub fn from_mode(mode: KPlusMode) -> Self {
        match mode {
            KPlusMode::Observed => ModelTag::Me1,
            KPlusMode::Me2 => ModelTag::Me2,
            KPlusMode::Me3 => ModelTag::Me3,
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelTag::Me1 => "ME1",
            ModelTag::Me2 => "ME2",
            ModelTag::Me3 => "ME3",
            ModelTag::Ng => "NG",
        })
    }
}

/// Recursive weights together with the `F` and `G` arrays they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    /// `w(m)` for `m < active − 1`.
    weights: Vec<f64>,
    /// `F(m) = w(m)(k_m − k⁺_m)` for `m < active − 1`.
    flow: Vec<f64>,
    /// `G(j)` for `j < active`; `G(0) = 0`.
    prefix: Vec<f64>,
    active: usize,
}

impl WeightSequence {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `F(m)`, the weighted number of links from rank `m` to lower ranks.
    pub fn flow(&self, m: usize) -> f64 {
        self.flow.get(m).copied().unwrap_or(0.0)
    }

    /// `G(j) = Σ_{n<j} F(n)`.
    pub fn prefix(&self, j: usize) -> f64 {
        self.prefix[j]
    }

    /// Number of ranks with nonzero degree.
    pub fn active(&self) -> usize {
        self.active
    }
}

fn check_sequences(k: &[usize], kp: &[usize]) -> Result<usize> {
    if k.len() != kp.len() {
        return Err(Error::DimensionMismatch { expected: k.len(), found: kp.len() });
    }
    if k.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Domain("degree sequence must be nonincreasing".into()));
    }
    if let Some(r) = kp.iter().zip(k).position(|(a, b)| a > b) {
        return Err(Error::Domain(format!("k+ exceeds degree at rank {}", r + 1)));
    }
    let active = k.iter().take_while(|&&d| d > 0).count();
    if active < 2 {
        return Err(Error::Domain("ensemble needs at least one link".into()));
    }
    Ok(active)
}

/// Evaluates the weight recursion.
///
/// A zero or negative denominator yields [`Error::SingularWeights`] carrying
/// the 1-based rank where it occurred.
pub fn compute_weights(k: &[usize], kp: &KPlusSequence) -> Result<WeightSequence> {
    weights_for(k, kp.values())
}

pub(crate) fn weights_for(k: &[usize], kp: &[usize]) -> Result<WeightSequence> {
    let active = check_sequences(k, kp)?;
    let stored = active - 1;
    let mut weights = Vec::with_capacity(stored);
    let mut flow = Vec::with_capacity(stored);
    let mut prefix = Vec::with_capacity(active);
    prefix.push(0.0);

    weights.push(1.0);
    flow.push((k[0] - kp[0]) as f64);
    prefix.push(flow[0]);
    for m in 1..stored {
        let g = prefix[m];
        let prev = weights[m - 1];
        let denom = g - kp[m] as f64 * prev;
        if !(denom > 0.0) || !(g > 0.0) {
            return Err(Error::SingularWeights { rank: m + 1 });
        }
        let w = prev * g / denom;
        if !w.is_finite() {
            return Err(Error::SingularWeights { rank: m + 1 });
        }
        weights.push(w);
        flow.push(w * (k[m] - kp[m]) as f64);
        prefix.push(g + flow[m]);
    }
    if !(prefix[active - 1] > 0.0) {
        return Err(Error::SingularWeights { rank: active });
    }
    Ok(WeightSequence { weights, flow, prefix, active })
}

/// Lazily evaluated maximal-entropy link probabilities, indexed by rank.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkProbabilityModel {
    degrees: Vec<usize>,
    kplus: KPlusSequence,
    weights: WeightSequence,
    links: usize,
    tag: ModelTag,
}

impl LinkProbabilityModel {
    /// Builds the model for a ranked degree sequence and a matching k⁺.
    pub fn new(degrees: Vec<usize>, kplus: KPlusSequence) -> Result<Self> {
        let weights = compute_weights(&degrees, &kplus)?;
        let links = kplus.total();
        let tag = ModelTag::from_mode(kplus.mode());
        Ok(LinkProbabilityModel { degrees, kplus, weights, links, tag })
    }

    pub fn tag(&self) -> ModelTag {
        self.tag
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn kplus(&self) -> &KPlusSequence {
        &self.kplus
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn link_count(&self) -> usize {
        self.links
    }

    /// `p(i, j)`; zero on the diagonal and for any inactive rank.
    pub fn probability(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        if lo == hi || hi >= self.weights.active {
            return 0.0;
        }
        let kp = self.kplus.values()[hi];
        if kp == 0 {
            return 0.0;
        }
        self.weights.flow(lo) / self.weights.prefix(hi) * (kp as f64 / self.links as f64)
    }

    /// Like [`probability`](Self::probability) but rejects `i == j`.
    pub fn link_probability(&self, i: usize, j: usize) -> Result<f64> {
        if i == j {
            return Err(Error::Domain(format!("no link probability for the pair ({i}, {i})")));
        }
        let n = self.node_count();
        if i >= n || j >= n {
            return Err(Error::Domain(format!("rank out of range 0..{n}")));
        }
        Ok(self.probability(i, j))
    }

    /// Expected number of links `e_ij = L p_ij`.
    pub fn expected_links(&self, i: usize, j: usize) -> f64 {
        self.links as f64 * self.probability(i, j)
    }

    /// Variance of the link count `s_ij = L p_ij (1 − p_ij)`.
    pub fn link_variance(&self, i: usize, j: usize) -> f64 {
        let p = self.probability(i, j);
        self.links as f64 * p * (1.0 - p)
    }

    /// Every `p(i, ·)` as a dense row.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.node_count()).map(|j| self.probability(i, j)).collect()
    }

    /// Pairs whose expected link count exceeds one.
    pub fn multi_edge_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.node_count();
        let l = self.links as f64;
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| l * self.probability(i, j) > 1.0)
            .collect()
    }
}

/// Worst row violation of the two soft constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintResiduals {
    /// `max_r |Σ_j L p(r, j) − k_r|`
    pub degree: f64,
    /// `max_r |Σ_{j<r} L p(r, j) − k⁺_r|`
    pub kplus: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        self.degree.max(self.kplus)
    }
}

/// Sums every row of the model explicitly and compares with the constraints.
pub fn verify_soft_constraints(model: &LinkProbabilityModel) -> ConstraintResiduals {
    let n = model.node_count();
    let l = model.link_count() as f64;
    let kp = model.kplus().values();
    let degrees = model.degrees();
    (0..n)
        .into_par_iter()
        .map(|r| {
            let mut upper = 0.0;
            let mut total = 0.0;
            for j in 0..n {
                let e = l * model.probability(r, j);
                total += e;
                if j < r {
                    upper += e;
                }
            }
            ConstraintResiduals {
                degree: (total - degrees[r] as f64).abs(),
                kplus: (upper - kp[r] as f64).abs(),
            }
        })
        .reduce(
            || ConstraintResiduals { degree: 0.0, kplus: 0.0 },
            |a, b| ConstraintResiduals { degree: a.degree.max(b.degree), kplus: a.kplus.max(b.kplus) },
        )
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// `S = −2 Σ_{i<j} p ln p` by direct double summation, `O(N²)`.
pub fn entropy_naive(model: &LinkProbabilityModel) -> f64 {
    let n = model.node_count();
    let sum: f64 = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| plogp(model.probability(i, j))).sum::<f64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    -2.0 * sum
}

/// Entropy from the factorised form
///
/// ```text
/// S = −2 [ Σ_i (F(i)/L) ln(F(i)/L) A(i) + Σ_i (F(i)/L) B(i) ]
/// A(i) = Σ_{j>i} k⁺_j / G(j)
/// B(i) = Σ_{j>i} (k⁺_j / G(j)) ln(k⁺_j / G(j))
/// ```
///
/// with `A` and `B` accumulated in one backward pass. `O(N)` after the
/// weights.
pub fn entropy_fast(k: &[usize], kp: &KPlusSequence) -> Result<f64> {
    let weights = compute_weights(k, kp)?;
    Ok(entropy_from_weights(&weights, kp.values(), kp.total()))
}

pub(crate) fn entropy_from_weights(weights: &WeightSequence, kp: &[usize], links: usize) -> f64 {
    let l = links as f64;
    let mut suffix_a = 0.0;
    let mut suffix_b = 0.0;
    let mut total = 0.0;
    for i in (0..weights.active).rev() {
        let f = weights.flow(i) / l;
        if f > 0.0 {
            total += f * f.ln() * suffix_a + f * suffix_b;
        }
        if i > 0 {
            let ratio = kp[i] as f64 / weights.prefix(i);
            suffix_a += ratio;
            suffix_b += plogp(ratio);
        }
    }
    -2.0 * total
}

impl LinkProbabilityModel {
    /// Entropy via the `O(N)` factorised form.
    pub fn entropy(&self) -> f64 {
        entropy_from_weights(&self.weights, self.kplus.values(), self.links)
    }
}

/// Draws `L` independent links from `{p(i, j)}_{i<j}` and returns them as rank
/// pairs `(i, j)` with `i < j`.
///
/// `p(i, j)` factorises into `P(j) = k⁺_j / L` and `P(i | j) = F(i) / G(j)`,
/// so each draw is a weighted pick of `j` followed by a binary search over
/// `G`.
pub fn sample_network<R: Rng + ?Sized>(model: &LinkProbabilityModel, rng: &mut R) -> Vec<(usize, usize)> {
    let active = model.weights.active;
    let kp = &model.kplus.values()[..active];
    let upper = WeightedIndex::new(kp.iter().map(|&v| v as f64)).expect("k+ sums to L > 0");
    let prefix = &model.weights.prefix;
    (0..model.links)
        .map(|_| {
            let j = upper.sample(rng);
            let target = rng.gen::<f64>() * prefix[j];
            // first i with G(i + 1) > target, skipping zero-flow ranks
            let i = prefix[1..=j].partition_point(|&g| g <= target).min(j - 1);
            (i, j)
        })
        .collect()
}

/// Anything that assigns an expected number of links to node pairs.
pub trait PairModel: Sync {
    fn node_count(&self) -> usize;

    fn link_count(&self) -> usize;

    /// The degree the model is constrained to reproduce for node `i`.
    fn target_degree(&self, i: usize) -> usize;

    fn probability(&self, i: usize, j: usize) -> f64;

    fn expected_links(&self, i: usize, j: usize) -> f64 {
        self.link_count() as f64 * self.probability(i, j)
    }

    fn tag(&self) -> ModelTag;
}

impl PairModel for LinkProbabilityModel {
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
        LinkProbabilityModel::probability(self, i, j)
    }

    fn tag(&self) -> ModelTag {
        self.tag
    }
}

/// A rank-indexed model viewed through a ranking, so that it is addressed by
/// node index like the graph it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphEnsemble {
    model: LinkProbabilityModel,
    ranking: Ranking,
}

impl GraphEnsemble {
    /// Pairs a ranking with a k⁺ sequence expressed along that ranking.
    pub fn new(g: &Graph, ranking: Ranking, kplus: KPlusSequence) -> Result<Self> {
        let degrees = ranking.ranked_degrees(g);
        let model = LinkProbabilityModel::new(degrees, kplus)?;
        Ok(GraphEnsemble { model, ranking })
    }

    /// The ME1 model: k⁺ read off the graph under `ranking`.
    pub fn observed(g: &Graph, ranking: Ranking) -> Result<Self> {
        let kplus = kplus_from_graph(g, &ranking);
        Self::new(g, ranking, kplus)
    }

    pub fn model(&self) -> &LinkProbabilityModel {
        &self.model
    }

    pub fn ranking(&self) -> &Ranking {
        &self.ranking
    }
}

impl PairModel for GraphEnsemble {
    fn node_count(&self) -> usize {
        self.model.node_count()
    }

    fn link_count(&self) -> usize {
        self.model.links
    }

    fn target_degree(&self, i: usize) -> usize {
        self.model.degrees[self.ranking.rank_of(i)]
    }

    fn probability(&self, i: usize, j: usize) -> f64 {
        self.model.probability(self.ranking.rank_of(i), self.ranking.rank_of(j))
    }

    fn tag(&self) -> ModelTag {
        self.model.tag
    }
}
