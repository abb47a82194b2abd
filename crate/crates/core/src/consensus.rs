//! Partition stability under re-ranking of equal-degree nodes.
//!
//! Each run shuffles the ties in the degree ranking, rebuilds the null (and
//! re-runs the k⁺ search for ME2/ME3) and partitions again. Pairs that share
//! a community in every run and are linked in the graph grow into invariant
//! cores.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::communities::Partition;
use crate::error::{Error, Result};
use crate::graph::{Graph, TiePolicy};
use crate::pipeline::{run_pipeline, Recipe};

pub const DEFAULT_RUNS: usize = 100;

/// Seeds of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSeeds {
    pub ranking: u64,
    pub search: u64,
}

/// Seeds for run `index`, drawn from stream `index` of a generator keyed by
/// `master_seed`, so earlier runs never depend on how many runs follow.
pub fn run_seeds(master_seed: u64, index: usize) -> RunSeeds {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index as u64);
    RunSeeds { ranking: rng.next_u64(), search: rng.next_u64() }
}

/// Outcome of one run; failures keep their error.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub index: usize,
    pub seeds: RunSeeds,
    pub partition: Option<Partition>,
    pub error: Option<Error>,
}

/// Runs one pipeline with the seeds of run `index`.
pub fn single_run(g: &Graph, recipe: &Recipe, master_seed: u64, index: usize) -> Result<Partition> {
    let seeds = run_seeds(master_seed, index);
    run_pipeline(g, recipe, TiePolicy::Seeded(seeds.ranking), seeds.search).map(|out| out.partition)
}

/// `runs` independent pipelines with randomised tie-breaking, in index order.
pub fn randomized_rank_runs(g: &Graph, recipe: &Recipe, runs: usize, master_seed: u64) -> Result<Vec<RunRecord>> {
    if runs == 0 {
        return Err(Error::Domain("at least one run is required".into()));
    }
    Ok((0..runs)
        .into_par_iter()
        .map(|index| {
            let seeds = run_seeds(master_seed, index);
            match single_run(g, recipe, master_seed, index) {
                Ok(p) => RunRecord { index, seeds, partition: Some(p), error: None },
                Err(e) => RunRecord { index, seeds, partition: None, error: Some(e) },
            }
        })
        .collect())
}

/// Symmetric counts of runs in which two nodes share a community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceMatrix {
    n: usize,
    runs: usize,
    counts: Vec<u32>,
}

impl CooccurrenceMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn run_count(&self) -> usize {
        self.runs
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.n + j]
    }

    /// Unordered pairs `(i, j, count)` with `i < j` and a nonzero count.
    pub fn nonzero_pairs(&self) -> Vec<(usize, usize, u32)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.count(i, j)))
            .filter(|&(_, _, c)| c > 0)
            .collect()
    }
}

pub fn cooccurrence(partitions: &[Partition]) -> Result<CooccurrenceMatrix> {
    let Some(first) = partitions.first() else {
        return Err(Error::Domain("no partitions to aggregate".into()));
    };
    let n = first.node_count();
    let mut counts = vec![0u32; n * n];
    for p in partitions {
        if p.node_count() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.node_count() });
        }
        for members in p.communities() {
            for &i in &members {
                for &j in &members {
                    counts[i * n + j] += 1;
                }
            }
        }
    }
    Ok(CooccurrenceMatrix { n, runs: partitions.len(), counts })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components (size ≥ 2) of the graph formed by links of `g` whose
/// endpoints co-occur in at least `threshold` runs (`None` means every run).
/// Members are sorted and cores are ordered by their smallest member.
pub fn invariant_cores(cm: &CooccurrenceMatrix, g: &Graph, threshold: Option<usize>) -> Result<Vec<Vec<usize>>> {
    if g.node_count() != cm.n {
        return Err(Error::DimensionMismatch { expected: cm.n, found: g.node_count() });
    }
    let needed = threshold.unwrap_or(cm.runs) as u32;
    let mut parent: Vec<usize> = (0..cm.n).collect();
    for &(u, v) in g.edges() {
        if cm.count(u, v) >= needed {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..cm.n {
        let root = find(&mut parent, v);
        groups.entry(root).or_default().push(v);
    }
    let mut cores: Vec<Vec<usize>> = groups.into_values().filter(|c| c.len() >= 2).collect();
    cores.sort_by_key(|c| c[0]);
    Ok(cores)
}
