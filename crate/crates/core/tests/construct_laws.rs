mod common;

use std::collections::BTreeSet;

use syncgraph::construct::{build, enumerate_trees, make_tree, TreeSpec};
use syncgraph::spectral::matches_optimal_spectrum;

fn assert_none(fails: Vec<String>) {
    assert!(
        fails.is_empty(),
        "{} failures, first: {:?}",
        fails.len(),
        &fails[..fails.len().min(5)]
    );
}

#[test]
fn degree_sequence_is_almost_regular() {
    assert_none(common::degree_sequence_law(7));
}

#[test]
fn degree_sequence_example() {
    for spec in [TreeSpec::star(5), TreeSpec::path(5), TreeSpec::random(5, 3)] {
        let (g, _) = build(5, 7, &spec).unwrap();
        assert_eq!(g.in_degree_sequence().as_slice(), [1, 1, 1, 2, 2]);
    }
}

#[test]
fn in_neighbors_follow_the_tree() {
    assert_none(common::in_neighbor_law(6));
}

#[test]
fn last_vertex_has_no_out_arcs_until_late() {
    assert_none(common::zero_column_law(7));
}

#[test]
fn arcs_from_last_vertex_hit_full_vertices() {
    assert_none(common::outgoing_from_n_law(7));
}

#[test]
fn dropping_the_last_vertex_recovers_a_smaller_build() {
    assert_none(common::subgraph_recursion_law(7));
}

#[test]
fn subgraph_recursion_example() {
    let (g, _) = build(5, 7, &TreeSpec::star(5)).unwrap();
    let d5 = g.in_neighbors(5).len();
    let keep: BTreeSet<usize> = (1..=4).collect();
    let (h, _) = build(4, 7 - d5, &TreeSpec::star(4)).unwrap();
    assert_eq!(g.induced_subgraph(&keep).unwrap(), h);
}

#[test]
fn large_m_graphs_ignore_the_seed() {
    assert_none(common::large_m_law(6));
}

#[test]
fn star_seed_uses_smallest_labels() {
    assert_none(common::star_seed_law(8));
}

#[test]
fn coinciding_sequences_stay_together() {
    assert_none(common::absorption_law(5));
}

#[test]
fn built_graphs_contain_seed_and_are_rooted_at_one() {
    for n in 2..=6 {
        for tree in enumerate_trees(n).unwrap() {
            let arcs: Vec<(usize, usize)> = tree.arcs().collect();
            for m in n - 1..=n * (n - 1) {
                let (g, trace) = build(n, m, &TreeSpec::explicit(n, arcs.clone())).unwrap();
                assert_eq!(g.m(), m);
                assert!(arcs.iter().all(|&(t, h)| g.has_arc(t, h)));
                assert!(g.is_rooted().1.contains(&1));
                assert_eq!(trace.replay().unwrap(), g);
                for s in &trace.steps {
                    assert_eq!(s.v, n - ((s.m - 1) % n));
                }
            }
        }
    }
}

#[test]
fn constructed_spectra_are_optimal() {
    for n in 2..=12 {
        let mut specs = vec![TreeSpec::star(n), TreeSpec::path(n)];
        specs.extend((0..3).map(|s| TreeSpec::random(n, 1000 + s)));
        for spec in specs {
            for m in n - 1..=n * (n - 1) {
                let (g, _) = build(n, m, &spec).unwrap();
                assert!(matches_optimal_spectrum(&g), "n={n} m={m} {spec:?}");
            }
        }
    }
}

#[test]
fn tree_enumeration_is_distinct_and_valid() {
    for n in 2..=8usize {
        let trees: Vec<_> = enumerate_trees(n).unwrap().collect();
        let expected: usize = (1..n).product();
        assert_eq!(trees.len(), expected);
        let unique: BTreeSet<Vec<(usize, usize)>> =
            trees.iter().map(|t| t.arcs().collect()).collect();
        assert_eq!(unique.len(), expected);
        for t in &trees {
            assert_eq!(t.m(), n - 1);
            assert!(t.arcs().all(|(a, b)| a < b));
            assert!(t.out_neighbors(n).is_empty());
            assert_eq!(common::reachable(t, 1).len(), n);
        }
    }
}

#[test]
fn random_trees_are_valid_seeds() {
    for seed in 0..200 {
        let t = make_tree(&TreeSpec::random(10, seed)).unwrap();
        assert!(t.arcs().all(|(a, b)| a < b));
        assert_eq!(common::reachable(&t, 1).len(), 10);
    }
}
