//! Labeled simple directed graphs, optionally with nonzero integer arc weights.
//!
//! Vertices are `1..=n`. An arc `(tail, head)` points from `tail` to `head`;
//! the in-degree of a vertex counts the arcs whose head it is. Arcs are kept
//! in lexicographic `(tail, head)` order so every iteration is deterministic.

pub mod format;

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::{tarjan_scc, toposort};
use petgraph::graph::{DiGraph as PetGraph, NodeIndex};
use thiserror::Error;

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex count must be in 1..={MAX_VERTICES}, got {0}")]
    InvalidVertexCount(usize),
    #[error("self-arc at vertex {0}")]
    SelfArc(usize),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(usize, usize),
    #[error("arc ({tail}, {head}) has an endpoint outside 1..={n}")]
    EndpointOutOfRange { tail: usize, head: usize, n: usize },
    #[error("arc ({0}, {1}) has weight 0")]
    ZeroWeight(usize, usize),
    #[error("{arcs} arcs but {weights} weights")]
    WeightCountMismatch { arcs: usize, weights: usize },
    #[error("operation requires an unweighted graph")]
    WeightedUnsupported,
    #[error("induced subgraph needs at least one vertex")]
    EmptyKeepSet,
    #[error("vertex {0} is not in the graph")]
    VertexOutOfRange(usize),
}

/// A labeled simple directed graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiGraph {
    n: usize,
    // (tail, head) -> weight; weight is 1 for every arc of an unweighted graph.
    arcs: BTreeMap<(usize, usize), i64>,
    weighted: bool,
}

/// In-degrees sorted non-decreasingly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeSequence(pub Vec<i64>);

impl DegreeSequence {
    /// The almost-regular sequence with `n(ν+1)−m` entries `ν` followed by
    /// `m−nν` entries `ν+1`, where `ν = ⌊m/n⌋`.
    pub fn almost_regular(n: usize, m: i64) -> Self {
        let n_i = n as i64;
        let nu = m.div_euclid(n_i);
        let high = (m - n_i * nu) as usize;
        let mut degrees = vec![nu; n - high];
        degrees.extend(std::iter::repeat_n(nu + 1, high));
        DegreeSequence(degrees)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Max minus min is at most one.
    pub fn is_almost_regular(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(lo), Some(hi)) => hi - lo <= 1,
            _ => true,
        }
    }
}

/// Validating constructor; `weights`, when given, are aligned with `arcs`.
/// A graph without arcs is always unweighted.
pub fn make_digraph(
    n: usize,
    arcs: &[(usize, usize)],
    weights: Option<&[i64]>,
) -> Result<DiGraph, GraphError> {
    if n == 0 || n > MAX_VERTICES {
        return Err(GraphError::InvalidVertexCount(n));
    }
    if let Some(w) = weights {
        if w.len() != arcs.len() {
            return Err(GraphError::WeightCountMismatch {
                arcs: arcs.len(),
                weights: w.len(),
            });
        }
    }
    let mut map = BTreeMap::new();
    for (idx, &(tail, head)) in arcs.iter().enumerate() {
        if tail == 0 || head == 0 || tail > n || head > n {
            return Err(GraphError::EndpointOutOfRange { tail, head, n });
        }
        if tail == head {
            return Err(GraphError::SelfArc(tail));
        }
        let weight = weights.map_or(1, |w| w[idx]);
        if weight == 0 {
            return Err(GraphError::ZeroWeight(tail, head));
        }
        if map.insert((tail, head), weight).is_some() {
            return Err(GraphError::DuplicateArc(tail, head));
        }
    }
    let weighted = weights.is_some() && !map.is_empty();
    Ok(DiGraph {
        n,
        arcs: map,
        weighted,
    })
}

impl DiGraph {
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        make_digraph(n, arcs, None)
    }

    pub fn with_weights(
        n: usize,
        arcs: &[(usize, usize)],
        weights: &[i64],
    ) -> Result<Self, GraphError> {
        make_digraph(n, arcs, Some(weights))
    }

    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::new(n, &[])
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let arcs: Vec<_> = (1..=n)
            .flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        Self::new(n, &arcs)
    }

    /// Builds an unweighted graph from arcs already known to be valid and
    /// distinct. Used on hot paths inside the crate.
    pub(crate) fn from_valid_arcs<I>(n: usize, arcs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let arcs: BTreeMap<_, _> = arcs.into_iter().map(|a| (a, 1)).collect();
        debug_assert!(arcs
            .keys()
            .all(|&(t, h)| t != h && (1..=n).contains(&t) && (1..=n).contains(&h)));
        DiGraph {
            n,
            arcs,
            weighted: false,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of arcs.
    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    /// Sum of arc weights (the arc count for unweighted graphs).
    pub fn net_weight(&self) -> i64 {
        self.arcs.values().sum()
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn has_arc(&self, tail: usize, head: usize) -> bool {
        self.arcs.contains_key(&(tail, head))
    }

    pub fn weight(&self, tail: usize, head: usize) -> Option<i64> {
        self.arcs.get(&(tail, head)).copied()
    }

    /// Arcs in lexicographic `(tail, head)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.keys().copied()
    }

    /// Arcs with their weights, in lexicographic order.
    pub fn weighted_arcs(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.arcs.iter().map(|(&a, &w)| (a, w))
    }

    /// Tails of arcs entering `v`, ascending.
    pub fn in_neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.arcs
            .keys()
            .filter(|&&(_, h)| h == v)
            .map(|&(t, _)| t)
            .collect()
    }

    pub fn out_neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.arcs
            .range((v, 0)..=(v, usize::MAX))
            .map(|(&(_, h), _)| h)
            .collect()
    }

    /// Weighted in-degree of every vertex, indexed by `label − 1`.
    pub fn in_degrees(&self) -> Vec<i64> {
        let mut deg = vec![0; self.n];
        for (&(_, h), &w) in &self.arcs {
            deg[h - 1] += w;
        }
        deg
    }

    /// Weighted out-degree of every vertex, indexed by `label − 1`.
    pub fn out_degrees(&self) -> Vec<i64> {
        let mut deg = vec![0; self.n];
        for (&(t, _), &w) in &self.arcs {
            deg[t - 1] += w;
        }
        deg
    }

    pub fn in_degree_sequence(&self) -> DegreeSequence {
        let mut deg = self.in_degrees();
        deg.sort_unstable();
        DegreeSequence(deg)
    }

    /// The graph on the same vertices holding exactly the ordered pairs that
    /// are not arcs of `self`.
    pub fn complement(&self) -> Result<DiGraph, GraphError> {
        if self.weighted {
            return Err(GraphError::WeightedUnsupported);
        }
        let n = self.n;
        let arcs = (1..=n)
            .flat_map(|i| (1..=n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && !self.has_arc(i, j));
        Ok(DiGraph::from_valid_arcs(n, arcs))
    }

    /// Reverses every arc, carrying weights along.
    pub fn transpose(&self) -> DiGraph {
        DiGraph {
            n: self.n,
            arcs: self.arcs.iter().map(|(&(t, h), &w)| ((h, t), w)).collect(),
            weighted: self.weighted,
        }
    }

    /// Subgraph induced by `keep`, relabeled `1..=|keep|` in ascending order
    /// of the original labels.
    pub fn induced_subgraph(&self, keep: &BTreeSet<usize>) -> Result<DiGraph, GraphError> {
        if keep.is_empty() {
            return Err(GraphError::EmptyKeepSet);
        }
        if let Some(&v) = keep.iter().find(|&&v| v == 0 || v > self.n) {
            return Err(GraphError::VertexOutOfRange(v));
        }
        let relabel: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
        let arcs = self
            .arcs
            .iter()
            .filter_map(|(&(t, h), &w)| Some(((*relabel.get(&t)?, *relabel.get(&h)?), w)))
            .collect();
        Ok(DiGraph {
            n: keep.len(),
            arcs,
            weighted: self.weighted,
        })
    }

    fn to_petgraph(&self) -> PetGraph<(), ()> {
        let mut pg = PetGraph::with_capacity(self.n, self.arcs.len());
        for _ in 0..self.n {
            pg.add_node(());
        }
        for &(t, h) in self.arcs.keys() {
            pg.add_edge(NodeIndex::new(t - 1), NodeIndex::new(h - 1), ());
        }
        pg
    }

    /// Strongly connected components, each as a sorted label set, together
    /// with a flag telling whether any arc enters the component from outside.
    pub fn strong_components(&self) -> Vec<(BTreeSet<usize>, bool)> {
        let pg = self.to_petgraph();
        let mut comps: Vec<BTreeSet<usize>> = tarjan_scc(&pg)
            .into_iter()
            .map(|c| c.into_iter().map(|ix| ix.index() + 1).collect())
            .collect();
        comps.sort();
        let mut comp_of = vec![0usize; self.n + 1];
        for (ci, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = ci;
            }
        }
        let mut entered = vec![false; comps.len()];
        for &(t, h) in self.arcs.keys() {
            if comp_of[t] != comp_of[h] {
                entered[comp_of[h]] = true;
            }
        }
        comps.into_iter().zip(entered).collect()
    }

    /// Whether some vertex reaches every other vertex along directed paths,
    /// and the set of all such vertices.
    ///
    /// In the condensation every component is reachable from a component
    /// with no entering arcs, so the graph is rooted exactly when there is a
    /// single such component, and its vertices are the roots.
    pub fn is_rooted(&self) -> (bool, BTreeSet<usize>) {
        let mut sources = self
            .strong_components()
            .into_iter()
            .filter(|(_, entered)| !entered);
        match (sources.next(), sources.next()) {
            (Some((roots, _)), None) => (true, roots),
            _ => (false, BTreeSet::new()),
        }
    }

    pub fn is_acyclic(&self) -> bool {
        toposort(&self.to_petgraph(), None).is_ok()
    }

    /// Weight-balanced: weighted in-degree equals weighted out-degree at
    /// every vertex.
    pub fn is_balanced(&self) -> bool {
        self.in_degrees() == self.out_degrees()
    }
}
