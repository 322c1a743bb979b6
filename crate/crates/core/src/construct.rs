//! The inductive construction of optimal graphs from a seed tree.
//!
//! A seed tree on `n` vertices has `n − 1` arcs `(i, j)` with `i < j`, so it
//! is rooted at vertex 1 and is described by its parent list
//! `(p_2, …, p_n)` with `p_k ∈ 1..k`. Starting from the tree, each step
//! `m = n, n+1, …` adds the arc `(u, v)` where `v = n − ((m−1) mod n)` and
//! `u` is the smallest vertex other than `v` that is not yet an in-neighbor
//! of `v`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::digraph::DiGraph;
use crate::rng::SeedRng;

/// Largest `n` accepted by [`enumerate_trees`].
pub const MAX_ENUMERATED_N: usize = 9;
/// Largest `n` accepted by [`build`]; the adjacency bitmap has `n²` bits.
pub const MAX_BUILD_N: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("invalid seed tree: {0}")]
    InvalidTreeArcs(String),
    #[error("tree rank {rank} out of range, there are {count} trees")]
    RankOutOfRange { rank: u64, count: u64 },
    #[error("n = {n} outside {min}..={max}")]
    NOutOfRange { n: usize, min: usize, max: usize },
    #[error("m = {m} outside {min}..={max} for n = {n}")]
    MOutOfRange {
        n: usize,
        m: usize,
        min: usize,
        max: usize,
    },
    #[error("no admissible tail for head {v} at n = {n}, m = {m}")]
    InternalUNotFound { n: usize, m: usize, v: usize },
    #[error("in-degree {d} is infeasible for vertex {i}")]
    DegreeInfeasible { i: usize, d: usize },
    #[error("trace line {line}: {msg}")]
    TraceSyntax { line: usize, msg: String },
    #[error("trace step m = {m}: {msg}")]
    TraceMismatch { m: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TreeKind {
    Star,
    Path,
    Random(u64),
    Explicit(Vec<(usize, usize)>),
    /// 0-based rank in the order of [`enumerate_trees`].
    Index(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeSpec {
    pub n: usize,
    pub kind: TreeKind,
}

impl TreeSpec {
    pub fn star(n: usize) -> Self {
        TreeSpec {
            n,
            kind: TreeKind::Star,
        }
    }

    pub fn path(n: usize) -> Self {
        TreeSpec {
            n,
            kind: TreeKind::Path,
        }
    }

    pub fn random(n: usize, seed: u64) -> Self {
        TreeSpec {
            n,
            kind: TreeKind::Random(seed),
        }
    }

    pub fn explicit(n: usize, arcs: Vec<(usize, usize)>) -> Self {
        TreeSpec {
            n,
            kind: TreeKind::Explicit(arcs),
        }
    }

    pub fn index(n: usize, rank: u64) -> Self {
        TreeSpec {
            n,
            kind: TreeKind::Index(rank),
        }
    }
}

/// `(n − 1)!`, saturating at `u64::MAX`.
pub fn tree_count(n: usize) -> u64 {
    (1..n as u64)
        .try_fold(1u64, |acc, k| acc.checked_mul(k))
        .unwrap_or(u64::MAX)
}

fn tree_from_parents(n: usize, parents: &[usize]) -> DiGraph {
    DiGraph::from_valid_arcs(n, parents.iter().enumerate().map(|(i, &p)| (p, i + 2)))
}

/// Parent list `(p_2, …, p_n)` of the `rank`-th tree: mixed radix with
/// `p_n` varying fastest.
fn parents_from_rank(n: usize, mut rank: u64) -> Vec<usize> {
    let mut parents = vec![1; n - 1];
    for k in (2..=n).rev() {
        let radix = (k - 1) as u64;
        parents[k - 2] = 1 + (rank % radix) as usize;
        rank /= radix;
    }
    parents
}

/// Checks the seed conditions and returns the parent list.
pub fn seed_parents(tree: &DiGraph) -> Result<Vec<usize>, ConstructError> {
    let n = tree.n();
    if n < 2 {
        return Err(ConstructError::InvalidTreeArcs(
            "a seed tree needs at least two vertices".into(),
        ));
    }
    if tree.is_weighted() {
        return Err(ConstructError::InvalidTreeArcs(
            "seed tree must be unweighted".into(),
        ));
    }
    if tree.m() != n - 1 {
        return Err(ConstructError::InvalidTreeArcs(format!(
            "{} arcs, expected {}",
            tree.m(),
            n - 1
        )));
    }
    let mut parents = vec![0; n - 1];
    for (t, h) in tree.arcs() {
        if t >= h {
            return Err(ConstructError::InvalidTreeArcs(format!(
                "arc ({t}, {h}) does not go from a smaller to a larger label"
            )));
        }
        if parents[h - 2] != 0 {
            return Err(ConstructError::InvalidTreeArcs(format!(
                "vertex {h} has two parents"
            )));
        }
        parents[h - 2] = t;
    }
    Ok(parents)
}

pub fn make_tree(spec: &TreeSpec) -> Result<DiGraph, ConstructError> {
    let n = spec.n;
    if !(2..=MAX_BUILD_N).contains(&n) {
        return Err(ConstructError::NOutOfRange {
            n,
            min: 2,
            max: MAX_BUILD_N,
        });
    }
    let parents: Vec<usize> = match &spec.kind {
        TreeKind::Star => vec![1; n - 1],
        TreeKind::Path => (1..n).collect(),
        TreeKind::Random(seed) => {
            let mut rng = SeedRng::new(*seed);
            (2..=n)
                .map(|k| 1 + rng.below(k as u64 - 1) as usize)
                .collect()
        }
        TreeKind::Explicit(arcs) => {
            let g = DiGraph::new(n, arcs)
                .map_err(|e| ConstructError::InvalidTreeArcs(e.to_string()))?;
            seed_parents(&g)?
        }
        TreeKind::Index(rank) => {
            let count = tree_count(n);
            if *rank >= count {
                return Err(ConstructError::RankOutOfRange { rank: *rank, count });
            }
            parents_from_rank(n, *rank)
        }
    };
    Ok(tree_from_parents(n, &parents))
}

/// All `(n−1)!` seed trees in lexicographic order of their parent lists.
pub fn enumerate_trees(n: usize) -> Result<impl Iterator<Item = DiGraph>, ConstructError> {
    if !(2..=MAX_ENUMERATED_N).contains(&n) {
        return Err(ConstructError::NOutOfRange {
            n,
            min: 2,
            max: MAX_ENUMERATED_N,
        });
    }
    Ok((0..tree_count(n)).map(move |r| tree_from_parents(n, &parents_from_rank(n, r))))
}

/// One arc addition: the graph grows from `m − 1` to `m` arcs by `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub m: usize,
    pub v: usize,
    pub u: usize,
}

/// Head of the arc added when the graph reaches `m` arcs.
pub fn head_for(n: usize, m: usize) -> usize {
    n - ((m - 1) % n)
}

/// Incremental construction state. Each head keeps a cursor to the smallest
/// candidate tail; tails only ever get used up, so the cursor only moves
/// forward.
#[derive(Debug, Clone)]
pub struct Builder {
    n: usize,
    m: usize,
    // bit (u−1)·n + (v−1) is set when (u, v) is an arc
    bits: Vec<u64>,
    cursor: Vec<usize>,
    in_deg: Vec<usize>,
    steps: Vec<Step>,
    tree: Vec<(usize, usize)>,
}

impl Builder {
    pub fn new(tree: &DiGraph) -> Result<Self, ConstructError> {
        let n = tree.n();
        if n > MAX_BUILD_N {
            return Err(ConstructError::NOutOfRange {
                n,
                min: 2,
                max: MAX_BUILD_N,
            });
        }
        seed_parents(tree)?;
        let mut b = Builder {
            n,
            m: 0,
            bits: vec![0; (n * n).div_ceil(64)],
            cursor: vec![1; n + 1],
            in_deg: vec![0; n + 1],
            steps: Vec::new(),
            tree: tree.arcs().collect(),
        };
        for (t, h) in tree.arcs() {
            b.insert(t, h);
        }
        Ok(b)
    }

    fn bit(&self, u: usize, v: usize) -> usize {
        (u - 1) * self.n + (v - 1)
    }

    fn insert(&mut self, u: usize, v: usize) {
        let k = self.bit(u, v);
        self.bits[k / 64] |= 1 << (k % 64);
        self.in_deg[v] += 1;
        self.m += 1;
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        let k = self.bit(u, v);
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_deg[v]
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Adds the next arc. Fails with `MOutOfRange` once the graph is complete.
    pub fn step(&mut self) -> Result<Step, ConstructError> {
        let n = self.n;
        let m = self.m + 1;
        if m > n * (n - 1) {
            return Err(ConstructError::MOutOfRange {
                n,
                m,
                min: n - 1,
                max: n * (n - 1),
            });
        }
        let v = head_for(n, m);
        let mut u = self.cursor[v];
        while u <= n && (u == v || self.has_arc(u, v)) {
            u += 1;
        }
        if u > n {
            return Err(ConstructError::InternalUNotFound { n, m, v });
        }
        self.cursor[v] = u;
        self.insert(u, v);
        let s = Step { m, v, u };
        self.steps.push(s);
        Ok(s)
    }

    pub fn advance_to(&mut self, m: usize) -> Result<(), ConstructError> {
        let n = self.n;
        if m < self.m || m > n * (n - 1) {
            return Err(ConstructError::MOutOfRange {
                n,
                m,
                min: self.m,
                max: n * (n - 1),
            });
        }
        while self.m < m {
            self.step()?;
        }
        Ok(())
    }

    pub fn to_graph(&self) -> DiGraph {
        let n = self.n;
        DiGraph::from_valid_arcs(
            n,
            (1..=n)
                .flat_map(|u| (1..=n).map(move |v| (u, v)))
                .filter(|&(u, v)| u != v && self.has_arc(u, v)),
        )
    }

    pub fn trace(&self) -> ConstructionTrace {
        ConstructionTrace {
            n: self.n,
            tree: self.tree.clone(),
            steps: self.steps.clone(),
        }
    }
}

/// Seed arcs and the ordered arc additions that produced a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub n: usize,
    pub tree: Vec<(usize, usize)>,
    pub steps: Vec<Step>,
}

impl ConstructionTrace {
    /// Arc count of the final graph.
    pub fn m(&self) -> usize {
        self.tree.len() + self.steps.len()
    }

    /// Line 1 `n m`, line 2 the seed arcs as `tail:head`, then `m v u` per
    /// step.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        let seed: Vec<String> = self.tree.iter().map(|(t, h)| format!("{t}:{h}")).collect();
        out.push_str(&seed.join(" "));
        out.push('\n');
        for s in &self.steps {
            let _ = writeln!(out, "{} {} {}", s.m, s.v, s.u);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, ConstructError> {
        let syntax = |line: usize, msg: &str| ConstructError::TraceSyntax {
            line,
            msg: msg.to_string(),
        };
        let lines: Vec<&str> = text.lines().collect();
        let header: Vec<usize> = lines
            .first()
            .ok_or_else(|| syntax(1, "empty trace"))?
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| syntax(1, "expected `n m`"))?;
        let [n, m] = header[..] else {
            return Err(syntax(1, "expected `n m`"));
        };
        let tree = lines
            .get(1)
            .ok_or_else(|| syntax(2, "missing seed arcs"))?
            .split_whitespace()
            .map(|tok| {
                let (t, h) = tok
                    .split_once(':')
                    .ok_or_else(|| syntax(2, "expected `tail:head`"))?;
                Ok((
                    t.parse().map_err(|_| syntax(2, "bad tail"))?,
                    h.parse().map_err(|_| syntax(2, "bad head"))?,
                ))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut steps = Vec::new();
        for (i, line) in lines.iter().enumerate().skip(2) {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| syntax(i + 1, "expected `m v u`"))?;
            let [m, v, u] = f[..] else {
                return Err(syntax(i + 1, "expected `m v u`"));
            };
            steps.push(Step { m, v, u });
        }
        let trace = ConstructionTrace { n, tree, steps };
        if trace.m() != m {
            return Err(syntax(1, "arc count does not match the listed steps"));
        }
        Ok(trace)
    }

    /// Re-runs the construction from the seed and checks every recorded step.
    pub fn replay(&self) -> Result<DiGraph, ConstructError> {
        let tree = make_tree(&TreeSpec::explicit(self.n, self.tree.clone()))?;
        let mut b = Builder::new(&tree)?;
        for s in &self.steps {
            let got = b.step().map_err(|e| ConstructError::TraceMismatch {
                m: s.m,
                msg: e.to_string(),
            })?;
            if got != *s {
                return Err(ConstructError::TraceMismatch {
                    m: s.m,
                    msg: format!(
                        "expected ({} {} {}), recorded ({} {} {})",
                        got.m, got.v, got.u, s.m, s.v, s.u
                    ),
                });
            }
        }
        Ok(b.to_graph())
    }
}

/// The graph with `m` arcs grown from the given seed, and its trace.
pub fn build(
    n: usize,
    m: usize,
    tree: &TreeSpec,
) -> Result<(DiGraph, ConstructionTrace), ConstructError> {
    if tree.n != n {
        return Err(ConstructError::InvalidTreeArcs(format!(
            "tree has {} vertices, expected {n}",
            tree.n
        )));
    }
    let seed = make_tree(tree)?;
    if m < n - 1 || m > n * (n - 1) {
        return Err(ConstructError::MOutOfRange {
            n,
            m,
            min: n - 1,
            max: n * (n - 1),
        });
    }
    let mut b = Builder::new(&seed)?;
    b.advance_to(m)?;
    Ok((b.to_graph(), b.trace()))
}

/// In-neighbors of vertex `i` with in-degree `d` in any graph grown from
/// `tree`: `{2, …, d+1}` for the root, otherwise the tree parent plus the
/// `d − 1` smallest labels other than `i` and the parent.
pub fn expected_in_neighbors(
    tree: &DiGraph,
    i: usize,
    d: usize,
) -> Result<BTreeSet<usize>, ConstructError> {
    let parents = seed_parents(tree)?;
    let n = tree.n();
    if i == 0 || i > n || d > n - 1 || (i >= 2 && d == 0) {
        return Err(ConstructError::DegreeInfeasible { i, d });
    }
    if i == 1 {
        return Ok((2..=d + 1).collect());
    }
    let p = parents[i - 2];
    Ok(std::iter::once(p)
        .chain((1..=n).filter(|&k| k != i && k != p).take(d - 1))
        .collect())
}

/// Complement of the forest made of a star rooted at `n` with leaves
/// `1, …, n(n−1) − m`; valid for `(n−1)² ≤ m ≤ n(n−1)`.
pub fn large_m_complement_form(n: usize, m: usize) -> Result<DiGraph, ConstructError> {
    if !(2..=MAX_BUILD_N).contains(&n) {
        return Err(ConstructError::NOutOfRange {
            n,
            min: 2,
            max: MAX_BUILD_N,
        });
    }
    let (lo, hi) = ((n - 1) * (n - 1), n * (n - 1));
    if m < lo || m > hi {
        return Err(ConstructError::MOutOfRange {
            n,
            m,
            min: lo,
            max: hi,
        });
    }
    let forest = DiGraph::from_valid_arcs(n, (1..=hi - m).map(|k| (n, k)));
    Ok(forest.complement().expect("forest is unweighted"))
}
