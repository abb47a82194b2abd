use nalgebra::DMatrix;
use proptest::prelude::*;
use richclub::baselines::newman_girvan;
use richclub::communities::{
    modularity_value, recursive_partition, soft_modularity_matrix, spectral_bipartition, standard_modularity_matrix,
    Bipartition, Partition, SpectralOptions,
};
use richclub::graph::{rank_nodes, Graph, TiePolicy};
use richclub::pipeline::{build_null, NullKind, SearchSettings};

fn graph_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            let edges: Vec<_> = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

/// `B = M − diag(row sums of M)` with `M = a − k kᵀ / 2L`, zero diagonal.
fn ng_generalised(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let l2 = 2.0 * g.edge_count() as f64;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
                m[(i, j)] = a - (g.degree(i) * g.degree(j)) as f64 / l2;
            }
        }
    }
    let sums: Vec<f64> = (0..n).map(|i| m.row(i).sum()).collect();
    for (i, s) in sums.into_iter().enumerate() {
        m[(i, i)] -= s;
    }
    m
}

fn best_split_gain(b: &DMatrix<f64>) -> f64 {
    let n = b.nrows();
    (0u32..1 << (n - 1))
        .map(|mask| {
            let s = DMatrix::from_fn(n, 1, |i, _| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 });
            0.5 * (s.transpose() * b * &s)[(0, 0)]
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #[test]
    fn spectral_split_never_beats_brute_force(g in graph_strategy(3, 8)) {
        let Ok(ng) = newman_girvan(&g) else { return Ok(()) };
        let m = standard_modularity_matrix(&g, &ng).unwrap();
        let b = ng_generalised(&g);
        let all: Vec<usize> = (0..g.node_count()).collect();
        let opts = SpectralOptions { dense_fallback: false, ..SpectralOptions::default() };
        let best = best_split_gain(&b);
        let top = b.clone().symmetric_eigen().eigenvalues.max();
        match spectral_bipartition(&m, &all, &opts).unwrap() {
            Bipartition::Split { eigenvalue, q_contribution, .. } => {
                prop_assert!(q_contribution <= best + 1e-9);
                prop_assert!((eigenvalue - top).abs() <= 1e-7 * top.abs().max(1.0), "{eigenvalue} vs {top}");
            }
            Bipartition::Indivisible => {}
        }
    }

    #[test]
    fn relabelling_communities_keeps_q(g in graph_strategy(3, 10), raw in proptest::collection::vec(0usize..4, 10), shift in 1usize..4) {
        let Ok(ng) = newman_girvan(&g) else { return Ok(()) };
        let m = standard_modularity_matrix(&g, &ng).unwrap();
        let n = g.node_count();
        let a = Partition::from_assignment(&raw[..n]);
        let b = Partition::from_assignment(&raw[..n].iter().map(|c| (c + shift) % 4 * 7).collect::<Vec<_>>());
        let (qa, qb) = (modularity_value(&m, &a).unwrap(), modularity_value(&m, &b).unwrap());
        prop_assert!((qa - qb).abs() < 1e-12);
    }

    #[test]
    fn leaves_partition_the_nodes(g in graph_strategy(3, 14)) {
        let Ok(ng) = newman_girvan(&g) else { return Ok(()) };
        let m = standard_modularity_matrix(&g, &ng).unwrap();
        let (tree, part) = recursive_partition(&m, &SpectralOptions::default()).unwrap();
        let mut seen = vec![0; g.node_count()];
        for node in tree.nodes() {
            if let richclub::communities::DendrogramNode::Leaf { members, community } = node {
                for &v in members {
                    seen[v] += 1;
                    prop_assert_eq!(part.community(v), *community);
                }
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let q = modularity_value(&m, &part).unwrap();
        prop_assert!((q - tree.leaf_q()).abs() < 1e-9);
        prop_assert!(tree.best_cut_q() >= tree.leaf_q() - 1e-12);
    }

    #[test]
    fn strict_splits_all_gain(g in graph_strategy(4, 14)) {
        let Ok(ng) = newman_girvan(&g) else { return Ok(()) };
        let m = standard_modularity_matrix(&g, &ng).unwrap();
        let opts = SpectralOptions { strict: true, ..SpectralOptions::default() };
        let (tree, _) = recursive_partition(&m, &opts).unwrap();
        prop_assert!(tree.split_contributions().iter().all(|&dq| dq > 0.0));
    }

    #[test]
    fn soft_matrix_flips_sign_on_exchange(g in graph_strategy(4, 16), seed in any::<u64>()) {
        prop_assume!(g.edge_count() >= 2);
        let ranking = rank_nodes(&g, TiePolicy::Seeded(seed));
        let settings = SearchSettings { stall_limit: Some(200), ..SearchSettings::default() };
        let Ok(me1) = build_null(&g, NullKind::Me1, &ranking, &settings, seed) else { return Ok(()) };
        let Ok(me3) = build_null(&g, NullKind::Me3, &ranking, &settings, seed) else { return Ok(()) };
        let ab = soft_modularity_matrix(&me1, &me3).unwrap();
        let ba = soft_modularity_matrix(&me3, &me1).unwrap();
        for i in 0..g.node_count() {
            for j in 0..g.node_count() {
                prop_assert_eq!(ab.get(i, j), -ba.get(i, j));
            }
        }
        let same = soft_modularity_matrix(&me3, &me3).unwrap();
        prop_assert!(same.row(0).iter().all(|&v| v == 0.0));
    }
}
