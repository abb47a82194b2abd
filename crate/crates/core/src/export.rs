//! Plot-ready CSV and structured JSON outputs.
//!
//! Every CSV starts with one comment line
//! `# richclub <version> seed=<seed> config=<hash>`; every JSON document
//! carries the same fields under `"provenance"`. Bodies depend only on their
//! inputs, so identical runs give identical bytes.

use serde::Serialize;

use crate::baselines::MultiGraph;
use crate::communities::{Dendrogram, DendrogramNode, Partition};
use crate::consensus::{CooccurrenceMatrix, RunRecord};
use crate::diagnostics::DiagnosticsCurve;
use crate::ensemble::PairModel;
use crate::error::{Error, Result};
use crate::graph::{Graph, KPlusSequence, NodeLabel, Ranking};

pub const TOOL_NAME: &str = "richclub";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(seed: u64, config_hash: impl Into<String>) -> Self {
        Provenance { tool: TOOL_NAME.into(), version: TOOL_VERSION.into(), seed, config_hash: config_hash.into() }
    }

    pub fn header_line(&self) -> String {
        format!("# {} {} seed={} config={}\n", self.tool, self.version, self.seed, self.config_hash)
    }
}

/// Header line, column names, then one record per row.
pub fn table_csv<I>(prov: &Provenance, header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(format!("csv output: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let body = w.into_inner().map_err(|e| Error::Domain(format!("csv output: {e}")))?;
    Ok(prov.header_line() + &String::from_utf8(body).expect("csv output is utf-8"))
}

/// `rank,node_id,degree,kplus` with 1-based ranks.
pub fn ranking_csv(prov: &Provenance, g: &Graph, ranking: &Ranking, kplus: &KPlusSequence) -> Result<String> {
    if kplus.len() != ranking.len() {
        return Err(Error::DimensionMismatch { expected: ranking.len(), found: kplus.len() });
    }
    let rows = ranking.order().iter().enumerate().map(|(r, &v)| {
        vec![(r + 1).to_string(), g.label(v).to_string(), g.degree(v).to_string(), kplus.values()[r].to_string()]
    });
    table_csv(prov, &["rank", "node_id", "degree", "kplus"], rows)
}

/// `rank,k,kplus` with 1-based ranks.
pub fn kplus_csv(prov: &Provenance, degrees: &[usize], kplus: &KPlusSequence) -> Result<String> {
    if kplus.len() != degrees.len() {
        return Err(Error::DimensionMismatch { expected: degrees.len(), found: kplus.len() });
    }
    let rows = degrees
        .iter()
        .zip(kplus.values())
        .enumerate()
        .map(|(r, (k, kp))| vec![(r + 1).to_string(), k.to_string(), kp.to_string()]);
    table_csv(prov, &["rank", "k", "kplus"], rows)
}

/// `i,j,p,e,s` for every unordered pair with `p > 0`, labelled by node id.
/// `s = L p (1 − p)` with `p` clamped to `[0, 1]`.
pub fn probabilities_csv<M: PairModel>(prov: &Provenance, labels: &[NodeLabel], model: &M) -> Result<String> {
    let n = model.node_count();
    if labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: labels.len() });
    }
    let links = model.link_count() as f64;
    let rows = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter_map(|(i, j)| {
        let p = model.probability(i, j);
        if p <= 0.0 {
            return None;
        }
        let pc = p.clamp(0.0, 1.0);
        Some(vec![
            labels[i].to_string(),
            labels[j].to_string(),
            p.to_string(),
            model.expected_links(i, j).to_string(),
            (links * pc * (1.0 - pc)).to_string(),
        ])
    });
    table_csv(prov, &["i", "j", "p", "e", "s"], rows)
}

/// `x,value,source,label`, one block per curve.
pub fn curves_csv(prov: &Provenance, curves: &[DiagnosticsCurve]) -> Result<String> {
    let rows = curves.iter().flat_map(|c| {
        c.points
            .iter()
            .map(move |(x, y)| vec![x.to_string(), y.to_string(), c.source.to_string(), c.label.clone()])
    });
    table_csv(prov, &["x", "value", "source", "label"], rows)
}

/// `step,entropy` for a search trace; step 0 is the starting point.
pub fn trace_csv(prov: &Provenance, trace: &[f64]) -> Result<String> {
    let rows = trace.iter().enumerate().map(|(s, e)| vec![s.to_string(), e.to_string()]);
    table_csv(prov, &["step", "entropy"], rows)
}

/// `node_id,community`, rows in internal node order.
pub fn partition_csv(prov: &Provenance, labels: &[NodeLabel], partition: &Partition) -> Result<String> {
    if labels.len() != partition.node_count() {
        return Err(Error::DimensionMismatch { expected: partition.node_count(), found: labels.len() });
    }
    let rows = labels.iter().zip(partition.assignment()).map(|(l, c)| vec![l.to_string(), c.to_string()]);
    table_csv(prov, &["node_id", "community"], rows)
}

/// `run,node_id,community` for a set of consensus runs; failed runs are
/// absent (see the run report).
pub fn run_partitions_csv(prov: &Provenance, labels: &[NodeLabel], runs: &[RunRecord]) -> Result<String> {
    let rows = runs.iter().filter_map(|r| r.partition.as_ref().map(|p| (r.index, p))).flat_map(|(run, p)| {
        labels.iter().zip(p.assignment()).map(move |(l, c)| vec![run.to_string(), l.to_string(), c.to_string()])
    });
    table_csv(prov, &["run", "node_id", "community"], rows)
}

/// `i,j,count` for unordered pairs with a nonzero count.
pub fn cooccurrence_csv(prov: &Provenance, labels: &[NodeLabel], cm: &CooccurrenceMatrix) -> Result<String> {
    if labels.len() != cm.node_count() {
        return Err(Error::DimensionMismatch { expected: cm.node_count(), found: labels.len() });
    }
    let rows = cm
        .nonzero_pairs()
        .into_iter()
        .map(|(i, j, c)| vec![labels[i].to_string(), labels[j].to_string(), c.to_string()]);
    table_csv(prov, &["i", "j", "count"], rows)
}

/// Edge list in the input format. Repeated links are written once per copy
/// and announced in a second comment line.
pub fn edge_list(prov: &Provenance, g: &MultiGraph) -> String {
    let mut out = prov.header_line();
    let repeats = g.multi_edge_count();
    if repeats > 0 {
        out += &format!("# multi-edges: {repeats} repeated links\n");
    }
    for &(u, v) in g.edges() {
        out += &format!("{} {}\n", g.labels()[u], g.labels()[v]);
    }
    out
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON of `body` with a `"provenance"` field added.
pub fn json_document<T: Serialize>(prov: &Provenance, body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Document { provenance: prov, body })
        .map_err(|e| Error::Domain(format!("json output: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    #[serde(rename = "N")]
    pub nodes: usize,
    #[serde(rename = "L")]
    pub links: usize,
    pub model_tag: String,
    pub entropy: Option<f64>,
    pub max_constraint_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchSummary {
    pub mode: String,
    pub direction: String,
    pub entropy: f64,
    pub proposals_used: usize,
    pub accepted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoresDocument {
    pub runs: usize,
    pub threshold: usize,
    pub cores: Vec<Vec<NodeLabel>>,
}

impl CoresDocument {
    pub fn new(cores: &[Vec<usize>], labels: &[NodeLabel], runs: usize, threshold: usize) -> Self {
        let cores = cores.iter().map(|c| c.iter().map(|&v| labels[v].clone()).collect()).collect();
        CoresDocument { runs, threshold, cores }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub requested: usize,
    pub succeeded: usize,
    pub failures: Vec<RunFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunFailure {
    pub run: usize,
    pub ranking_seed: u64,
    pub search_seed: u64,
    pub error: String,
}

impl RunReport {
    pub fn new(runs: &[RunRecord]) -> Self {
        let failures: Vec<RunFailure> = runs
            .iter()
            .filter_map(|r| {
                r.error.as_ref().map(|e| RunFailure {
                    run: r.index,
                    ranking_seed: r.seeds.ranking,
                    search_seed: r.seeds.search,
                    error: e.to_string(),
                })
            })
            .collect();
        RunReport { requested: runs.len(), succeeded: runs.len() - failures.len(), failures }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LabeledNode {
    Leaf {
        community: usize,
        members: Vec<NodeLabel>,
    },
    Split {
        eigenvalue: f64,
        q_contribution: f64,
        members: Vec<NodeLabel>,
        positive: Box<LabeledNode>,
        negative: Box<LabeledNode>,
    },
}

impl LabeledNode {
    fn new(node: &DendrogramNode, labels: &[NodeLabel]) -> Self {
        let names = |m: &[usize]| m.iter().map(|&v| labels[v].clone()).collect();
        match node {
            DendrogramNode::Leaf { members, community } => {
                LabeledNode::Leaf { community: *community, members: names(members) }
            }
            DendrogramNode::Split { members, eigenvalue, q_contribution, positive, negative } => LabeledNode::Split {
                eigenvalue: *eigenvalue,
                q_contribution: *q_contribution,
                members: names(members),
                positive: Box::new(LabeledNode::new(positive, labels)),
                negative: Box::new(LabeledNode::new(negative, labels)),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DendrogramDocument {
    pub base_q: f64,
    pub leaf_q: f64,
    pub best_cut_q: f64,
    pub split_q: Vec<f64>,
    pub root: LabeledNode,
}

impl DendrogramDocument {
    pub fn new(d: &Dendrogram, labels: &[NodeLabel]) -> Self {
        DendrogramDocument {
            base_q: d.base_q,
            leaf_q: d.leaf_q(),
            best_cut_q: d.best_cut_q(),
            split_q: d.split_contributions(),
            root: LabeledNode::new(&d.root, labels),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{rr_randomize, RrConfig, RrVariant};
    use crate::graph::{load_edge_list, load_edge_list_with, LabelPolicy};

    fn prov() -> Provenance {
        Provenance::new(7, "abc123")
    }

    #[test]
    fn header_and_quoting() {
        let g = load_edge_list_with("a,b c\nd e", LabelPolicy::Mixed).unwrap();
        let p = Partition::from_assignment(&[0, 0, 1, 1]);
        let out = partition_csv(&prov(), g.labels(), &p).unwrap();
        let expected = format!("# richclub {TOOL_VERSION} seed=7 config=abc123\nnode_id,community\n\"a,b\",0\nc,0\nd,1\ne,1\n");
        assert_eq!(out, expected);
    }

    #[test]
    fn kplus_rows_are_one_based() {
        let k = vec![2, 1, 1];
        let kp = KPlusSequence::new(vec![0, 1, 1], &k, crate::graph::KPlusMode::Observed).unwrap();
        let out = kplus_csv(&prov(), &k, &kp).unwrap();
        assert!(out.ends_with("rank,k,kplus\n1,2,0\n2,1,1\n3,1,1\n"));
    }

    #[test]
    fn edge_list_flags_repeats() {
        let g = load_edge_list("0 1\n2 3\n0 2\n1 3\n0 3\n1 2").unwrap();
        let multi = (0..50)
            .map(|s| rr_randomize(&g, &RrConfig::new(RrVariant::Rr2, s)).unwrap().graph)
            .find(|m| m.multi_edge_count() > 0)
            .unwrap();
        let text = edge_list(&prov(), &multi);
        assert!(text.lines().nth(1).unwrap().starts_with("# multi-edges:"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 6);
    }

    #[test]
    fn json_carries_provenance() {
        let s = ModelSummary { nodes: 3, links: 3, model_tag: "ME1".into(), entropy: Some(1.0), max_constraint_residual: None };
        let v: serde_json::Value = serde_json::from_str(&json_document(&prov(), &s).unwrap()).unwrap();
        assert_eq!(v["provenance"]["seed"], 7);
        assert_eq!(v["N"], 3);
        assert_eq!(v["model_tag"], "ME1");
    }
}
