//! Greedy search for the k⁺ sequence of the ME2 and ME3 ensembles.
//!
//! The search moves one unit of k⁺ at a time from a donor rank to a receiving
//! rank, keeping `Σ k⁺ = L`, and keeps the move only when the ensemble
//! entropy strictly improves in the configured direction.
//!
//! Two ranks are pinned in every feasible sequence: the first active rank has
//! `k⁺ = 0` (nothing ranks above it) and the last active rank has `k⁺ = k`
//! (every neighbour ranks above it). The second pin is what makes the degree
//! constraints hold exactly; without it the recursion still normalises but
//! rows drift away from their target degrees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::{entropy_from_weights, weights_for};
use crate::error::{Error, Result};
use crate::graph::{KPlusMode, KPlusSequence};

/// Bound family for the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SearchMode {
    /// `k⁺_r ≤ min(k_r, r − 1)`: at most one expected link per pair.
    Me2,
    /// `k⁺_r ≤ k_r`: multi-links allowed, self-loops not.
    Me3,
}

impl From<SearchMode> for KPlusMode {
    fn from(mode: SearchMode) -> Self {
        match mode {
            SearchMode::Me2 => KPlusMode::Me2,
            SearchMode::Me3 => KPlusMode::Me3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Direction {
    #[default]
    Maximize,
    Minimize,
}

impl Direction {
    fn improves(self, candidate: f64, current: f64) -> bool {
        match self {
            Direction::Maximize => candidate > current,
            Direction::Minimize => candidate < current,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub direction: Direction,
    pub seed: u64,
    /// Consecutive rejected proposals before stopping; `None` means `50·N`.
    pub stall_limit: Option<usize>,
    /// Hard cap on proposals; `None` means `5000·N`.
    pub max_proposals: Option<usize>,
}

impl SearchConfig {
    pub fn new(mode: SearchMode, seed: u64) -> Self {
        SearchConfig { mode, direction: Direction::Maximize, seed, stall_limit: None, max_proposals: None }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_stall_limit(mut self, stall_limit: usize) -> Self {
        self.stall_limit = Some(stall_limit);
        self
    }

    pub fn with_max_proposals(mut self, max_proposals: usize) -> Self {
        self.max_proposals = Some(max_proposals);
        self
    }

    fn limits(&self, n: usize) -> Result<(usize, usize)> {
        let stall = self.stall_limit.unwrap_or(50 * n).max(1);
        let max = self.max_proposals.unwrap_or(5000 * n);
        if max < stall {
            return Err(Error::Domain(format!(
                "max_proposals ({max}) must be at least stall_limit ({stall})"
            )));
        }
        Ok((stall, max))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub kplus: KPlusSequence,
    pub entropy: f64,
    /// Entropy of the starting sequence followed by the entropy after each
    /// accepted move.
    pub entropy_trace: Vec<f64>,
    pub proposals_used: usize,
    pub accepted_count: usize,
}

/// Per-rank bounds `lower_r ≤ k⁺_r ≤ upper_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPlusBounds {
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
}

impl KPlusBounds {
    pub fn new(k: &[usize], mode: SearchMode) -> Result<Self> {
        if k.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain("degree sequence must be nonincreasing".into()));
        }
        let active = k.iter().take_while(|&&d| d > 0).count();
        if active < 2 {
            return Err(Error::InfeasibleConstraints("fewer than two nodes with links".into()));
        }
        let mut upper: Vec<usize> = k
            .iter()
            .enumerate()
            .map(|(r, &d)| match mode {
                SearchMode::Me2 => d.min(r),
                SearchMode::Me3 => d,
            })
            .collect();
        upper[0] = 0;
        let last = active - 1;
        let mut lower = vec![0; k.len()];
        lower[last] = k[last];
        if upper[last] < lower[last] {
            return Err(Error::InfeasibleConstraints(format!(
                "rank {} needs k+ = {} but its bound is {}",
                active, k[last], upper[last]
            )));
        }
        upper[last] = k[last];

        let degree_sum: usize = k.iter().sum();
        if degree_sum % 2 != 0 {
            return Err(Error::InfeasibleConstraints("degree sum is odd".into()));
        }
        let links = degree_sum / 2;
        let capacity: usize = upper.iter().sum();
        if capacity < links {
            return Err(Error::InfeasibleConstraints(format!(
                "bounds admit at most {capacity} links, need {links}"
            )));
        }
        if k[last] > links {
            return Err(Error::InfeasibleConstraints("last rank exceeds total links".into()));
        }
        Ok(KPlusBounds { lower, upper })
    }
}

fn total_links(k: &[usize]) -> usize {
    k.iter().sum::<usize>() / 2
}

fn random_within<R: Rng>(bounds: &KPlusBounds, links: usize, rng: &mut R) -> Vec<usize> {
    let mut values = bounds.lower.clone();
    let remaining = links - values.iter().sum::<usize>();
    let mut slots: Vec<usize> = bounds
        .upper
        .iter()
        .zip(&bounds.lower)
        .enumerate()
        .flat_map(|(r, (&u, &l))| std::iter::repeat(r).take(u - l))
        .collect();
    let (picked, _) = slots.partial_shuffle(rng, remaining);
    for &r in picked.iter() {
        values[r] += 1;
    }
    values
}

const MAX_RESAMPLES: usize = 10_000;

/// Draws a k⁺ sequence uniformly over unit slots inside the bounds, retrying
/// until the weight recursion is regular.
pub fn random_feasible_kplus(k: &[usize], mode: SearchMode, seed: u64) -> Result<KPlusSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = KPlusBounds::new(k, mode)?;
    let values = feasible_start(k, &bounds, &mut rng)?;
    Ok(KPlusSequence::from_raw(values, mode.into()))
}

fn feasible_start<R: Rng>(k: &[usize], bounds: &KPlusBounds, rng: &mut R) -> Result<Vec<usize>> {
    let links = total_links(k);
    for _ in 0..MAX_RESAMPLES {
        let values = random_within(bounds, links, rng);
        if weights_for(k, &values).is_ok() {
            return Ok(values);
        }
    }
    Err(Error::InfeasibleConstraints(format!(
        "no regular k+ sequence found in {MAX_RESAMPLES} draws"
    )))
}

fn entropy_of(k: &[usize], kp: &[usize], links: usize) -> Option<f64> {
    weights_for(k, kp).ok().map(|w| entropy_from_weights(&w, kp, links))
}

/// Greedy single-unit exchange search over feasible k⁺ sequences.
///
/// Proposals that break a bound or make the recursion singular count as
/// rejections. The search stops after `stall_limit` consecutive rejections or
/// `max_proposals` proposals in total.
pub fn greedy_search(k: &[usize], config: &SearchConfig) -> Result<SearchResult> {
    let n = k.len();
    let (stall_limit, max_proposals) = config.limits(n)?;
    let bounds = KPlusBounds::new(k, config.mode)?;
    let links = total_links(k);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut kp = feasible_start(k, &bounds, &mut rng)?;
    let mut current = entropy_of(k, &kp, links).expect("start sequence is regular");
    let mut trace = vec![current];
    let mut stall = 0;
    let mut proposals = 0;

    while proposals < max_proposals && stall < stall_limit {
        proposals += 1;
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n - 1);
        let j = if j >= i { j + 1 } else { j };
        if kp[i] >= bounds.upper[i] || kp[j] <= bounds.lower[j] {
            stall += 1;
            continue;
        }
        kp[i] += 1;
        kp[j] -= 1;
        match entropy_of(k, &kp, links) {
            Some(candidate) if config.direction.improves(candidate, current) => {
                current = candidate;
                trace.push(candidate);
                stall = 0;
            }
            _ => {
                kp[i] -= 1;
                kp[j] += 1;
                stall += 1;
            }
        }
    }

    Ok(SearchResult {
        kplus: KPlusSequence::from_raw(kp, config.mode.into()),
        entropy: current,
        accepted_count: trace.len() - 1,
        entropy_trace: trace,
        proposals_used: proposals,
    })
}
