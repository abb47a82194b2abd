use std::collections::BTreeSet;

use proptest::prelude::*;
use richclub::baselines::{newman_girvan, rr_randomize, RrConfig, RrVariant};
use richclub::datasets::karate_club;
use richclub::ensemble::PairModel;
use richclub::graph::Graph;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            let edges: Vec<_> = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn sorted(mut d: Vec<usize>) -> Vec<usize> {
    d.sort_unstable();
    d
}

/// Every simple graph on `n` nodes with exactly these per-node degrees, as
/// sorted edge sets.
fn simple_realisations(degrees: &[usize]) -> BTreeSet<Vec<(usize, usize)>> {
    let n = degrees.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
            let mut d = vec![0; n];
            for &(u, v) in &edges {
                d[u] += 1;
                d[v] += 1;
            }
            (d == degrees).then_some(edges)
        })
        .collect()
}

proptest! {
    #[test]
    fn swaps_preserve_degrees(g in graph_strategy(12), seed in any::<u64>(), rr1 in any::<bool>(), attempts in 1usize..400) {
        prop_assume!(g.edge_count() >= 2);
        let variant = if rr1 { RrVariant::Rr1 } else { RrVariant::Rr2 };
        let cfg = RrConfig { variant, swap_attempts: Some(attempts), seed };
        let out = rr_randomize(&g, &cfg).unwrap();
        prop_assert_eq!(out.graph.degrees(), g.degrees());
        prop_assert!(!out.graph.has_self_loops());
        if rr1 {
            prop_assert!(out.graph.is_simple());
        }
        prop_assert_eq!(rr_randomize(&g, &cfg).unwrap(), out);
    }

    #[test]
    fn rr1_stays_in_the_realisation_set(g in graph_strategy(5), seed in any::<u64>()) {
        prop_assume!(g.edge_count() >= 2);
        let out = rr_randomize(&g, &RrConfig::new(RrVariant::Rr1, seed)).unwrap();
        let mut edges: Vec<(usize, usize)> = out.graph.edges().iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        prop_assert!(simple_realisations(&g.degrees()).contains(&edges));
    }

    #[test]
    fn ng_row_sums_follow_their_formula(g in graph_strategy(30)) {
        let Ok(ng) = newman_girvan(&g) else { return Ok(()) };
        let l2 = 2.0 * g.edge_count() as f64;
        for i in 0..g.node_count() {
            let row: f64 = (0..g.node_count()).map(|j| ng.expected_links(i, j)).sum();
            let ki = g.degree(i) as f64;
            prop_assert!((row - ki * (l2 - ki) / l2).abs() < 1e-12);
        }
    }
}

#[test]
fn karate_swaps_keep_degree_multiset() {
    let g = karate_club();
    for seed in 0..10 {
        for variant in [RrVariant::Rr1, RrVariant::Rr2] {
            let out = rr_randomize(&g, &RrConfig::new(variant, seed)).unwrap();
            assert_eq!(sorted(out.graph.degrees()), sorted(g.degrees()));
            assert!(out.accepted > 0);
        }
    }
}
