//! Small bundled networks.

use crate::graph::{load_edge_list, Graph};

pub const KARATE_EDGE_LIST: &str = include_str!("../data/karate.txt");

/// Zachary's karate club: 34 members, 78 friendships, ids 0..=33.
pub fn karate_club() -> Graph {
    load_edge_list(KARATE_EDGE_LIST).expect("bundled edge list parses")
}
