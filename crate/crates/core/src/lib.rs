//! Maximum-entropy null models for networks ranked by degree.
//!
//! Nodes are ranked by decreasing degree and every node's links are split
//! into `k⁺` (links to higher-ranked nodes) and the rest. Fixing `k` and `k⁺`
//! pins down a closed-form ensemble of pair probabilities. ME1 reads `k⁺` off
//! the data; ME2 and ME3 search for the `k⁺` that maximises entropy.
//!
//! ```
//! use richclub::datasets::karate_club;
//! use richclub::ensemble::GraphEnsemble;
//! use richclub::graph::{rank_nodes, TiePolicy};
//!
//! let g = karate_club();
//! let me1 = GraphEnsemble::observed(&g, rank_nodes(&g, TiePolicy::ById))?;
//! assert!(me1.model().entropy() > 0.0);
//! # Ok::<(), richclub::Error>(())
//! ```
//!
//! The [`baselines`] module adds the Newman–Girvan expectation and
//! degree-preserving rewiring, [`diagnostics`] the correlation and
//! homogeneity curves, [`communities`] modularity and spectral bisection, and
//! [`consensus`] the stability of partitions under tie reshuffling.

pub mod baselines;
pub mod communities;
pub mod consensus;
pub mod datasets;
pub mod diagnostics;
pub mod ensemble;
pub mod error;
pub mod export;
pub mod graph;
pub mod pipeline;
pub mod search;

pub use error::{Error, Result};
