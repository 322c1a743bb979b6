//! Algebraic connectivity and the linear consensus process `ẋ = −Lx`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use thiserror::Error;

use crate::digraph::DiGraph;
use crate::spectral::{
    laplacian, matches_optimal_spectrum, spectrum_numeric, spread_parameters, SpectralError,
    DEFAULT_TOL,
};

/// `dt · (max in-degree)` must not exceed this.
pub const STABILITY_MARGIN: f64 = 0.1;
/// Connectivity above this counts as positive.
pub const POSITIVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConsensusError {
    #[error("need at least two vertices")]
    TooFewVertices,
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("step size {dt} times max in-degree {max_degree} exceeds {STABILITY_MARGIN}")]
    UnstableStepSize { dt: f64, max_degree: f64 },
    #[error("step size must be positive and finite, got {0}")]
    InvalidStepSize(f64),
    #[error("initial state has {got} entries, graph has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("initial state must be finite")]
    NonFiniteState,
    #[error("sample stride must be positive")]
    InvalidStride,
}

impl From<SpectralError> for ConsensusError {
    fn from(_: SpectralError) -> Self {
        ConsensusError::ConvergenceFailure
    }
}

/// Second smallest real part among the Laplacian eigenvalues. Exact when the
/// graph carries the optimal spectrum.
pub fn algebraic_connectivity(g: &DiGraph) -> Result<f64, ConsensusError> {
    if g.n() < 2 {
        return Err(ConsensusError::TooFewVertices);
    }
    if matches_optimal_spectrum(g) {
        let values = spread_parameters(g.n(), g.net_weight()).optimal_values();
        return Ok(values[1] as f64);
    }
    let s = spectrum_numeric(&laplacian(g), DEFAULT_TOL)?;
    Ok(s.real_parts_sorted()[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityBound {
    pub a: f64,
    /// `m/(n−1)`, with `m` the net arc weight.
    pub bound: Ratio<i64>,
    pub holds: bool,
}

pub fn check_connectivity_bound(g: &DiGraph) -> Result<ConnectivityBound, ConsensusError> {
    let a = algebraic_connectivity(g)?;
    let bound = Ratio::new(g.net_weight(), g.n() as i64 - 1);
    let b = *bound.numer() as f64 / *bound.denom() as f64;
    Ok(ConnectivityBound {
        a,
        bound,
        holds: a <= b + POSITIVE_TOL,
    })
}

pub fn is_rooted_spectrally(g: &DiGraph) -> Result<bool, ConsensusError> {
    Ok(algebraic_connectivity(g)? > POSITIVE_TOL)
}

/// Largest total absolute incoming weight.
pub fn max_in_weight(g: &DiGraph) -> f64 {
    let mut d = vec![0.0f64; g.n()];
    for ((_, h), w) in g.weighted_arcs() {
        d[h - 1] += (w as f64).abs();
    }
    d.into_iter().fold(0.0, f64::max)
}

pub fn disagreement(x: &[f64]) -> f64 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    if x.is_empty() {
        0.0
    } else {
        max - min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusRun {
    pub x0: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub sample_stride: usize,
    pub times: Vec<f64>,
    pub trajectory: Vec<Vec<f64>>,
    pub disagreement: Vec<f64>,
}

impl ConsensusRun {
    pub fn final_state(&self) -> &[f64] {
        self.trajectory
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn final_disagreement(&self) -> f64 {
        *self
            .disagreement
            .last()
            .expect("trajectory holds the initial state")
    }

    /// Header `t,x1,…,xn,disagreement`, one row per sample.
    pub fn to_csv(&self) -> String {
        let n = self.x0.len();
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",x{i}");
        }
        out.push_str(",disagreement\n");
        for ((t, x), d) in self
            .times
            .iter()
            .zip(&self.trajectory)
            .zip(&self.disagreement)
        {
            let _ = write!(out, "{t}");
            for v in x {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{d}");
        }
        out
    }
}

fn rhs(arcs: &[(usize, usize, f64)], x: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for &(t, h, w) in arcs {
        out[h] += w * (x[t] - x[h]);
    }
}

pub fn simulate_consensus(
    g: &DiGraph,
    x0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<ConsensusRun, ConsensusError> {
    simulate_consensus_sampled(g, x0, dt, steps, 1)
}

/// Classical fourth-order Runge–Kutta on `ẋ = −Lx`, keeping every
/// `sample_stride`-th state (and always the initial one).
pub fn simulate_consensus_sampled(
    g: &DiGraph,
    x0: &[f64],
    dt: f64,
    steps: usize,
    sample_stride: usize,
) -> Result<ConsensusRun, ConsensusError> {
    let n = g.n();
    if x0.len() != n {
        return Err(ConsensusError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ConsensusError::InvalidStepSize(dt));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(ConsensusError::NonFiniteState);
    }
    if sample_stride == 0 {
        return Err(ConsensusError::InvalidStride);
    }
    let max_degree = max_in_weight(g);
    if dt * max_degree > STABILITY_MARGIN {
        return Err(ConsensusError::UnstableStepSize { dt, max_degree });
    }

    let arcs: Vec<(usize, usize, f64)> = g
        .weighted_arcs()
        .map(|((t, h), w)| (t - 1, h - 1, w as f64))
        .collect();
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];

    let capacity = steps / sample_stride + 1;
    let mut run = ConsensusRun {
        x0: x0.to_vec(),
        dt,
        steps,
        sample_stride,
        times: Vec::with_capacity(capacity),
        trajectory: Vec::with_capacity(capacity),
        disagreement: Vec::with_capacity(capacity),
    };
    let record = |run: &mut ConsensusRun, step: usize, x: &[f64]| {
        run.times.push(step as f64 * dt);
        run.disagreement.push(disagreement(x));
        run.trajectory.push(x.to_vec());
    };
    record(&mut run, 0, &x);
    for step in 1..=steps {
        rhs(&arcs, &x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        rhs(&arcs, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        rhs(&arcs, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        rhs(&arcs, &tmp, &mut k4);
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if step % sample_stride == 0 {
            record(&mut run, step, &x);
        }
    }
    Ok(run)
}

/// Limits of the strongly connected components that no arc enters. Such a
/// component evolves on its own and its states converge to the average of
/// its initial states weighted by the left null vector of its Laplacian.
/// Returns `(component, limit)` in order of smallest vertex.
pub fn closed_component_limits(
    g: &DiGraph,
    x0: &[f64],
) -> Result<Vec<(Vec<usize>, f64)>, ConsensusError> {
    if x0.len() != g.n() {
        return Err(ConsensusError::DimensionMismatch {
            expected: g.n(),
            got: x0.len(),
        });
    }
    let mut out = Vec::new();
    for (comp, entered) in g.strong_components() {
        if entered {
            continue;
        }
        let sub = g
            .induced_subgraph(&comp)
            .expect("component vertices belong to the graph");
        let p = left_null_vector(&sub).ok_or(ConsensusError::ConvergenceFailure)?;
        let verts: Vec<usize> = comp.into_iter().collect();
        let total: f64 = p.iter().sum();
        let limit = verts
            .iter()
            .zip(&p)
            .map(|(&v, &w)| w * x0[v - 1])
            .sum::<f64>()
            / total;
        out.push((verts, limit));
    }
    out.sort_by_key(|(v, _)| v[0]);
    Ok(out)
}

/// Positive vector `p` with `pᵀL = 0`, normalized to `p₁ = 1`, for a
/// strongly connected graph.
fn left_null_vector(g: &DiGraph) -> Option<Vec<f64>> {
    let k = g.n();
    if k == 1 {
        return Some(vec![1.0]);
    }
    let l = laplacian(g).to_f64();
    let lt = l.transpose();
    // rows 1.. of Lᵀp = 0 with p₀ = 1
    let a = DMatrix::from_fn(k - 1, k - 1, |i, j| lt[(i + 1, j + 1)]);
    let b = DVector::from_fn(k - 1, |i, _| -lt[(i + 1, 0)]);
    let rest = a.lu().solve(&b)?;
    Some(std::iter::once(1.0).chain(rest.iter().copied()).collect())
}

/// Spread of the closed-component limits: a lower bound on the disagreement
/// that persists as `t → ∞`. Zero for rooted graphs.
pub fn persistence_floor(g: &DiGraph, x0: &[f64]) -> Result<f64, ConsensusError> {
    let limits: Vec<f64> = closed_component_limits(g, x0)?
        .into_iter()
        .map(|(_, l)| l)
        .collect();
    Ok(disagreement(&limits))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCheck {
    pub a: f64,
    pub t_final: f64,
    pub initial: f64,
    pub final_disagreement: f64,
    /// `initial · e^{−0.8 a T}`
    pub envelope: f64,
    pub holds: bool,
}

/// Runs to `T = 10/a` with the largest stable step that divides `T` and
/// compares the final disagreement with the decay envelope.
pub fn check_decay_envelope(g: &DiGraph, x0: &[f64]) -> Result<DecayCheck, ConsensusError> {
    let a = algebraic_connectivity(g)?;
    if a <= POSITIVE_TOL {
        // not rooted: no decay is promised
        let d = disagreement(x0);
        return Ok(DecayCheck {
            a,
            t_final: f64::INFINITY,
            initial: d,
            final_disagreement: d,
            envelope: d,
            holds: false,
        });
    }
    let t_final = 10.0 / a;
    let dmax = max_in_weight(g).max(1.0);
    let steps = (t_final * dmax / STABILITY_MARGIN).ceil() as usize;
    let dt = t_final / steps as f64;
    let run = simulate_consensus_sampled(g, x0, dt, steps, steps.max(1))?;
    let initial = disagreement(x0);
    let envelope = initial * (-0.8 * a * t_final).exp();
    let final_disagreement = run.final_disagreement();
    Ok(DecayCheck {
        a,
        t_final,
        initial,
        final_disagreement,
        envelope,
        holds: final_disagreement <= envelope,
    })
}
