//! Glue from a graph and a ranking to a null model and a partition.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{newman_girvan, NgModel};
use crate::communities::{
    recursive_partition, soft_modularity_matrix, standard_modularity_matrix, Dendrogram, ModularityMatrix,
    Partition, SpectralOptions,
};
use crate::ensemble::{GraphEnsemble, ModelTag, PairModel};
use crate::error::{Error, Result};
use crate::graph::{rank_nodes, Graph, Ranking, TiePolicy};
use crate::search::{greedy_search, Direction, SearchConfig, SearchMode, SearchResult};

/// Null models that can back a modularity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NullKind {
    #[serde(rename = "ME1")]
    Me1,
    #[serde(rename = "ME2")]
    Me2,
    #[serde(rename = "ME3")]
    Me3,
    #[serde(rename = "NG")]
    Ng,
}

impl FromStr for NullKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ME1" => Ok(NullKind::Me1),
            "ME2" => Ok(NullKind::Me2),
            "ME3" => Ok(NullKind::Me3),
            "NG" => Ok(NullKind::Ng),
            other => Err(Error::Domain(format!("unknown null model {other:?}"))),
        }
    }
}

impl fmt::Display for NullKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NullKind::Me1 => "ME1",
            NullKind::Me2 => "ME2",
            NullKind::Me3 => "ME3",
            NullKind::Ng => "NG",
        })
    }
}

/// Search settings shared by every ME2/ME3 model a pipeline builds; the seed
/// is supplied per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SearchSettings {
    pub direction: Direction,
    pub stall_limit: Option<usize>,
    pub max_proposals: Option<usize>,
}

impl SearchSettings {
    pub fn config(&self, mode: SearchMode, seed: u64) -> SearchConfig {
        SearchConfig {
            mode,
            direction: self.direction,
            seed,
            stall_limit: self.stall_limit,
            max_proposals: self.max_proposals,
        }
    }
}

/// A built null model.
#[derive(Debug, Clone, PartialEq)]
pub enum NullModel {
    Ensemble { ensemble: GraphEnsemble, search: Option<SearchResult> },
    Ng(NgModel),
}

impl NullModel {
    pub fn ensemble(&self) -> Option<&GraphEnsemble> {
        match self {
            NullModel::Ensemble { ensemble, .. } => Some(ensemble),
            NullModel::Ng(_) => None,
        }
    }
}

impl PairModel for NullModel {
    fn node_count(&self) -> usize {
        match self {
            NullModel::Ensemble { ensemble, .. } => ensemble.node_count(),
            NullModel::Ng(m) => m.node_count(),
        }
    }

    fn link_count(&self) -> usize {
        match self {
            NullModel::Ensemble { ensemble, .. } => ensemble.link_count(),
            NullModel::Ng(m) => m.link_count(),
        }
    }

    fn target_degree(&self, i: usize) -> usize {
        match self {
            NullModel::Ensemble { ensemble, .. } => ensemble.target_degree(i),
            NullModel::Ng(m) => m.target_degree(i),
        }
    }

    fn probability(&self, i: usize, j: usize) -> f64 {
        match self {
            NullModel::Ensemble { ensemble, .. } => ensemble.probability(i, j),
            NullModel::Ng(m) => m.probability(i, j),
        }
    }

    fn expected_links(&self, i: usize, j: usize) -> f64 {
        match self {
            NullModel::Ensemble { ensemble, .. } => ensemble.expected_links(i, j),
            NullModel::Ng(m) => m.expected_links(i, j),
        }
    }

    fn tag(&self) -> ModelTag {
        match self {
            NullModel::Ensemble { ensemble, .. } => ensemble.tag(),
            NullModel::Ng(m) => m.tag(),
        }
    }
}

/// Builds `kind` for `g` under `ranking`. ME2/ME3 run the greedy search with
/// `search_seed`.
pub fn build_null(
    g: &Graph,
    kind: NullKind,
    ranking: &Ranking,
    settings: &SearchSettings,
    search_seed: u64,
) -> Result<NullModel> {
    let mode = match kind {
        NullKind::Ng => return newman_girvan(g).map(NullModel::Ng),
        NullKind::Me1 => {
            let ensemble = GraphEnsemble::observed(g, ranking.clone())?;
            return Ok(NullModel::Ensemble { ensemble, search: None });
        }
        NullKind::Me2 => SearchMode::Me2,
        NullKind::Me3 => SearchMode::Me3,
    };
    let degrees = ranking.ranked_degrees(g);
    let result = greedy_search(&degrees, &settings.config(mode, search_seed))?;
    let ensemble = GraphEnsemble::new(g, ranking.clone(), result.kplus.clone())?;
    Ok(NullModel::Ensemble { ensemble, search: Some(result) })
}

/// Everything needed to turn a ranking into a partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub null: NullKind,
    /// When set, communities come from the soft matrix of `(null, second)`.
    pub second: Option<NullKind>,
    pub search: SearchSettings,
    pub spectral: SpectralOptions,
}

impl Recipe {
    pub fn standard(null: NullKind) -> Self {
        Recipe { null, second: None, search: SearchSettings::default(), spectral: SpectralOptions::default() }
    }

    pub fn soft(first: NullKind, second: NullKind) -> Self {
        Recipe { second: Some(second), ..Recipe::standard(first) }
    }
}

pub struct PipelineOutput {
    pub ranking: Ranking,
    pub nulls: Vec<NullModel>,
    pub matrix: ModularityMatrix,
    pub dendrogram: Dendrogram,
    pub partition: Partition,
}

/// Ranks, builds the null(s), the modularity matrix and the partition.
pub fn run_pipeline(g: &Graph, recipe: &Recipe, ties: TiePolicy, search_seed: u64) -> Result<PipelineOutput> {
    let ranking = rank_nodes(g, ties);
    let first = build_null(g, recipe.null, &ranking, &recipe.search, search_seed)?;
    let (matrix, nulls) = match recipe.second {
        None => (standard_modularity_matrix(g, &first)?, vec![first]),
        Some(kind) => {
            let second = build_null(g, kind, &ranking, &recipe.search, search_seed.wrapping_add(1))?;
            (soft_modularity_matrix(&first, &second)?, vec![first, second])
        }
    };
    let (dendrogram, partition) = recursive_partition(&matrix, &recipe.spectral)?;
    Ok(PipelineOutput { ranking, nulls, matrix, dendrogram, partition })
}
