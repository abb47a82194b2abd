//! Degree-correlation and homogeneity diagnostics for graphs and ensembles.

use std::collections::BTreeMap;
use std::fmt;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{LinkProbabilityModel, ModelTag, PairModel};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveSource {
    Data,
    Model(ModelTag),
}

impl fmt::Display for CurveSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSource::Data => f.write_str("DATA"),
            CurveSource::Model(tag) => tag.fmt(f),
        }
    }
}

/// `(x, value)` points with strictly increasing `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsCurve {
    pub points: Vec<(f64, f64)>,
    pub label: String,
    pub source: CurveSource,
}

impl DiagnosticsCurve {
    pub fn new(points: Vec<(f64, f64)>, label: impl Into<String>, source: CurveSource) -> Result<Self> {
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Domain("curve abscissae must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.1.is_finite()) {
            return Err(Error::Domain("curve values must be finite".into()));
        }
        Ok(DiagnosticsCurve { points, label: label.into(), source })
    }

    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.points.iter().find(|p| p.0 == x).map(|p| p.1)
    }

    /// `Σ |value − baseline|` over all points.
    pub fn aggregate_deviation(&self, baseline: f64) -> f64 {
        self.points.iter().map(|p| (p.1 - baseline).abs()).sum()
    }
}

/// Averages per-node values over nodes sharing a degree. Zero-degree nodes
/// are skipped.
fn by_degree(degrees: &[usize], values: &[f64], label: &str, source: CurveSource) -> DiagnosticsCurve {
    let mut groups: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (&k, &v) in degrees.iter().zip(values) {
        if k == 0 {
            continue;
        }
        let e = groups.entry(k).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    let points = groups.into_iter().map(|(k, (s, c))| (k as f64, s / c as f64)).collect();
    DiagnosticsCurve { points, label: label.to_string(), source }
}

/// Observed `⟨k_nn(k)⟩`: for each degree, the mean over its nodes of the
/// mean neighbour degree.
pub fn knn_data(g: &Graph) -> Result<DiagnosticsCurve> {
    if g.edge_count() == 0 {
        return Err(Error::Domain("average neighbour degree needs at least one link".into()));
    }
    let degrees = g.degrees();
    let isolated = degrees.iter().filter(|&&d| d == 0).count();
    if isolated > 0 {
        warn!("{isolated} isolated nodes left out of the knn curve");
    }
    let values: Vec<f64> = (0..g.node_count())
        .map(|v| {
            let nb = g.neighbors(v);
            if nb.is_empty() {
                0.0
            } else {
                nb.iter().map(|&u| degrees[u] as f64).sum::<f64>() / nb.len() as f64
            }
        })
        .collect();
    Ok(by_degree(&degrees, &values, "knn", CurveSource::Data))
}

/// Ensemble `⟨k_nn(k)⟩ = (1/N_k) Σ_{i: k_i = k} (1/k) Σ_j L p_ij k_j`.
pub fn knn_ensemble<M: PairModel>(model: &M) -> DiagnosticsCurve {
    let n = model.node_count();
    let degrees: Vec<usize> = (0..n).map(|i| model.target_degree(i)).collect();
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            if degrees[i] == 0 {
                return 0.0;
            }
            let s: f64 = (0..n).map(|j| model.expected_links(i, j) * degrees[j] as f64).sum();
            s / degrees[i] as f64
        })
        .collect();
    by_degree(&degrees, &values, "knn", CurveSource::Model(model.tag()))
}

/// `⟨k²⟩ / ⟨k⟩`, the flat `k_nn` level of an uncorrelated network.
pub fn uncorrelated_knn(g: &Graph) -> Result<f64> {
    uncorrelated_knn_of(&g.degrees())
}

pub fn uncorrelated_knn_of(degrees: &[usize]) -> Result<f64> {
    let first: usize = degrees.iter().sum();
    if first == 0 {
        return Err(Error::Domain("all nodes are isolated".into()));
    }
    let second: usize = degrees.iter().map(|&k| k * k).sum();
    Ok(second as f64 / first as f64)
}

fn row_moments<M: PairModel>(model: &M, i: usize) -> (f64, f64) {
    (0..model.node_count())
        .filter(|&j| j != i)
        .map(|j| model.probability(i, j))
        .fold((0.0, 0.0), |(s, q), p| (s + p, q + p * p))
}

/// `c(k_i) = √(1/⟨k_i⟩ − Σ_j p²_ij / (L (Σ_j p_ij)²))` with `⟨k_i⟩ = L Σ_j p_ij`.
pub fn coefficient_of_variation<M: PairModel>(model: &M, i: usize) -> Result<f64> {
    let (sum, squares) = row_moments(model, i);
    let l = model.link_count() as f64;
    let mean = l * sum;
    if !(mean > 0.0) {
        return Err(Error::Domain(format!("node {i} has zero expected degree")));
    }
    let var_ratio = 1.0 / mean - squares / (l * sum * sum);
    // round-off can leave a deterministic row a hair below zero
    Ok(var_ratio.max(0.0).sqrt())
}

/// Inverse participation ratio `I_i = (Σ_j p_ij)² / Σ_j p²_ij`, the effective
/// number of pairs carrying node `i`'s expected degree.
pub fn inverse_participation<M: PairModel>(model: &M, i: usize) -> Result<f64> {
    let (sum, squares) = row_moments(model, i);
    if !(sum > 0.0) {
        return Err(Error::Domain(format!("node {i} has an all-zero probability row")));
    }
    Ok(sum * sum / squares)
}

fn per_node<M, F>(model: &M, f: F) -> Vec<f64>
where
    M: PairModel,
    F: Fn(&M, usize) -> Result<f64> + Sync,
{
    (0..model.node_count())
        .into_par_iter()
        .map(|i| if model.target_degree(i) == 0 { 0.0 } else { f(model, i).unwrap_or(0.0) })
        .collect()
}

/// IPR averaged over nodes of equal degree.
pub fn ipr_curve<M: PairModel>(model: &M) -> DiagnosticsCurve {
    let degrees: Vec<usize> = (0..model.node_count()).map(|i| model.target_degree(i)).collect();
    by_degree(&degrees, &per_node(model, inverse_participation), "ipr", CurveSource::Model(model.tag()))
}

/// Coefficient of variation averaged over nodes of equal degree.
pub fn cv_curve<M: PairModel>(model: &M) -> DiagnosticsCurve {
    let degrees: Vec<usize> = (0..model.node_count()).map(|i| model.target_degree(i)).collect();
    by_degree(&degrees, &per_node(model, coefficient_of_variation), "cv", CurveSource::Model(model.tag()))
}

/// IPR keyed by 1-based rank.
pub fn ipr_by_rank(model: &LinkProbabilityModel) -> DiagnosticsCurve {
    let values = per_node(model, inverse_participation);
    let points = values
        .into_iter()
        .enumerate()
        .filter(|&(r, _)| model.degrees()[r] > 0)
        .map(|(r, v)| ((r + 1) as f64, v))
        .collect();
    DiagnosticsCurve { points, label: "ipr_by_rank".into(), source: CurveSource::Model(model.tag()) }
}

pub const DEFAULT_CUTOFF_TOLERANCE: f64 = 0.10;

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

/// Scans degrees upward and returns the first degree at which the curve
/// leaves the median of all lower-degree points by more than `rel_tol`
/// (relative), provided the next point deviates too.
pub fn detect_cutoff_from_ipr(curve: &DiagnosticsCurve, rel_tol: f64) -> Option<f64> {
    let values: Vec<f64> = curve.points.iter().map(|p| p.1).collect();
    let deviates = |t: usize, reference: f64| (values[t] - reference).abs() > rel_tol * reference.abs();
    (1..values.len().saturating_sub(1)).find_map(|t| {
        let reference = median(&values[..t]);
        (deviates(t, reference) && deviates(t + 1, reference)).then_some(curve.points[t].0)
    })
}
