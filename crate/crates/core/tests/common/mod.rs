//! Independent oracles and structural-law checkers shared by the integration
//! tests and the acceptance suite. Each checker returns a list of failure
//! descriptions; an empty list means the law held everywhere it was tried.

#![allow(dead_code)]

use std::collections::BTreeSet;

use syncgraph::construct::{
    build, enumerate_trees, expected_in_neighbors, large_m_complement_form, Builder, TreeSpec,
};
use syncgraph::rng::SeedRng;
use syncgraph::DiGraph;

/// Every permutation of `0..n` with its sign.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i128)> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, i128)>) {
        if left.is_empty() {
            // sign from inversion count
            let inv = (0..prefix.len())
                .flat_map(|i| (i + 1..prefix.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for k in 0..left.len() {
            let v = left.remove(k);
            prefix.push(v);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(k, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// Leibniz expansion of `det(x·I − M)`.
pub fn det_shifted(m: &[Vec<i128>], x: i128, perms: &[(Vec<usize>, i128)]) -> i128 {
    let n = m.len();
    perms
        .iter()
        .map(|(p, sign)| {
            sign * (0..n)
                .map(|i| if p[i] == i { x - m[i][i] } else { -m[i][p[i]] })
                .product::<i128>()
        })
        .sum()
}

/// Evaluates an integer polynomial given constant-first coefficients.
pub fn eval_poly(coeffs: &[i128], x: i128) -> i128 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * x + c)
}

/// Uniformly random unweighted graph: every ordered pair is an arc with
/// probability one half.
pub fn random_graph(rng: &mut SeedRng, n: usize) -> DiGraph {
    let arcs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .filter(|_| rng.below(2) == 1)
        .collect();
    DiGraph::new(n, &arcs).unwrap()
}

/// Breadth-first reachable set from `r`.
pub fn reachable(g: &DiGraph, r: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([r]);
    let mut queue = vec![r];
    while let Some(v) = queue.pop() {
        for w in g.out_neighbors(v) {
            if seen.insert(w) {
                queue.push(w);
            }
        }
    }
    seen
}

/// The graphs grown from `tree` for every `m` from `n − 1` to `n(n−1)`.
pub fn grow_all(tree: &DiGraph) -> Vec<DiGraph> {
    let n = tree.n();
    let mut b = Builder::new(tree).unwrap();
    let mut out = vec![b.to_graph()];
    while b.m() < n * (n - 1) {
        b.step().unwrap();
        out.push(b.to_graph());
    }
    out
}

fn all_seeds(n: usize) -> Vec<DiGraph> {
    enumerate_trees(n).unwrap().collect()
}

/// `n(ν+1) − m` entries `ν` then `m − nν` entries `ν + 1`.
pub fn almost_regular_oracle(n: usize, m: usize) -> Vec<i64> {
    let nu = m / n;
    let mut v = vec![nu as i64; n * (nu + 1) - m];
    v.extend(std::iter::repeat_n((nu + 1) as i64, m - n * nu));
    v
}

pub fn degree_sequence_law(n_max: usize) -> Vec<String> {
    let mut fails = Vec::new();
    for n in 2..=n_max {
        for tree in all_seeds(n) {
            for (k, g) in grow_all(&tree).iter().enumerate() {
                let m = n - 1 + k;
                if g.in_degree_sequence().as_slice() != almost_regular_oracle(n, m) {
                    fails.push(format!(
                        "degree sequence n={n} m={m} tree={:?}",
                        tree.arcs().collect::<Vec<_>>()
                    ));
                }
            }
        }
    }
    fails
}

pub fn in_neighbor_law(n_max: usize) -> Vec<String> {
    let mut fails = Vec::new();
    for n in 2..=n_max {
        for tree in all_seeds(n) {
            for (k, g) in grow_all(&tree).iter().enumerate() {
                for i in 1..=n {
                    let d = g.in_neighbors(i).len();
                    let expected = expected_in_neighbors(&tree, i, d);
                    if expected.as_ref() != Ok(&g.in_neighbors(i)) {
                        fails.push(format!("in-neighbors n={n} m={} i={i}", n - 1 + k));
                    }
                }
            }
        }
    }
    fails
}

pub fn zero_column_law(n_max: usize) -> Vec<String> {
    let mut fails = Vec::new();
    for n in 2..=n_max {
        for tree in all_seeds(n) {
            for (k, g) in grow_all(&tree).iter().enumerate() {
                let m = n - 1 + k;
                if m <= (n - 1) * (n - 1) && !g.out_neighbors(n).is_empty() {
                    fails.push(format!("vertex n has out-arcs at n={n} m={m}"));
                }
            }
        }
    }
    fails
}

pub fn outgoing_from_n_law(n_max: usize) -> Vec<String> {
    let mut fails = Vec::new();
    for n in 2..=n_max {
        for tree in all_seeds(n) {
            for (k, g) in grow_all(&tree).iter().enumerate() {
                for v in g.out_neighbors(n) {
                    if g.in_neighbors(v).len() != n - 1 {
                        fails.push(format!(
                            "arc ({n}, {v}) into a non-full vertex at m={}",
                            n - 1 + k
                        ));
                    }
                }
            }
        }
    }
    fails
}

pub fn subgraph_recursion_law(n_max: usize) -> Vec<String> {
    let mut fails = Vec::new();
    for n in 3..=n_max {
        let keep: BTreeSet<usize> = (1..n).collect();
        for tree in all_seeds(n) {
            let sub_arcs: Vec<(usize, usize)> = tree.arcs().filter(|&(_, h)| h != n).collect();
            let graphs = grow_all(&tree);
            for m in n - 1..=(n - 1) * (n - 1) {
                let g = &graphs[m - (n - 1)];
                let d_n = g.in_neighbors(n).len();
                let lhs = g.induced_subgraph(&keep).unwrap();
                match build(n - 1, m - d_n, &TreeSpec::explicit(n - 1, sub_arcs.clone())) {
                    Ok((rhs, _)) if rhs == lhs => {}
                    _ => fails.push(format!("subgraph recursion n={n} m={m}")),
                }
            }
        }
    }
    fails
}

pub fn large_m_law(n_max: usize) -> Vec<String> {
    let mut fails = Vec::new();
    for n in 2..=n_max {
        let per_seed: Vec<Vec<DiGraph>> = all_seeds(n).iter().map(grow_all).collect();
        for m in (n - 1) * (n - 1)..=n * (n - 1) {
            let closed = large_m_complement_form(n, m).unwrap();
            for graphs in &per_seed {
                if graphs[m - (n - 1)] != closed {
                    fails.push(format!("large-m form n={n} m={m}"));
                }
            }
        }
    }
    fails
}

pub fn star_seed_law(n_max: usize) -> Vec<String> {
    let mut fails = Vec::new();
    for n in 2..=n_max {
        let star = syncgraph::construct::make_tree(&TreeSpec::star(n)).unwrap();
        for (k, g) in grow_all(&star).iter().enumerate() {
            for i in 1..=n {
                let actual = g.in_neighbors(i);
                let smallest: BTreeSet<usize> =
                    (1..=n).filter(|&j| j != i).take(actual.len()).collect();
                if actual != smallest {
                    fails.push(format!("star seed n={n} m={} i={i}", n - 1 + k));
                }
            }
        }
    }
    fails
}

pub fn absorption_law(n_max: usize) -> Vec<String> {
    let mut fails = Vec::new();
    for n in 2..=n_max {
        let per_seed: Vec<Vec<DiGraph>> = all_seeds(n).iter().map(grow_all).collect();
        for a in 0..per_seed.len() {
            for b in a + 1..per_seed.len() {
                let (x, y) = (&per_seed[a], &per_seed[b]);
                if let Some(first) = (0..x.len()).find(|&k| x[k] == y[k]) {
                    if (first..x.len()).any(|k| x[k] != y[k]) {
                        fails.push(format!("absorption n={n} seeds {a} and {b}"));
                    }
                }
            }
        }
    }
    fails
}
