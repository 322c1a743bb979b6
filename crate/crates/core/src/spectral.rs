//! Laplacians, exact characteristic polynomials, numeric spectra, and the
//! normalized eigenvalue spread.
//!
//! The Laplacian is the in-degree one, `L = D − A` with `A[i][j] = w` when
//! `(j, i)` is an arc of weight `w`; every row sums to zero. Optimality is
//! decided on exact integer polynomials, never on floating-point spectra.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::digraph::DiGraph;
use crate::poly::{sort_complex, IntPolynomial, PolyError};

/// Clustering tolerance for spectra of small integer Laplacians.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Tolerance for matching roots to integers in [`theorem2_report`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("no eigenvalue within {0:e} of zero")]
    NoZeroEigenvalue(f64),
    #[error("graph has a directed cycle")]
    NotAcyclic,
    #[error("need at least {need} eigenvalues, got {got}")]
    TooFewEigenvalues { need: usize, got: usize },
    #[error("spectrum has {got} values, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("polynomial must be monic of positive degree")]
    InvalidPolynomial,
    #[error("root finding failed")]
    RootFindingFailure,
}

impl From<PolyError> for SpectralError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::RootFindingFailure => SpectralError::RootFindingFailure,
            _ => SpectralError::InvalidPolynomial,
        }
    }
}

/// Dense square integer matrix, row-major. Entries are `i128`, which holds
/// any Laplacian of a graph with `i64` weights and at most 2^16 vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        IntMatrix {
            n,
            entries: rows.concat(),
        }
    }

    pub fn diagonal(d: &[i128]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> i128 {
        self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: i128) {
        self.entries[row * self.n + col] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i128>> {
        self.entries
            .chunks(self.n.max(1))
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<i128> {
        self.entries
            .chunks(self.n.max(1))
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.n, self.n, self.entries.iter().map(|&v| v as f64))
    }
}

/// In-degree Laplacian `D − A`.
pub fn laplacian(g: &DiGraph) -> IntMatrix {
    let mut l = IntMatrix::zeros(g.n());
    for ((t, h), w) in g.weighted_arcs() {
        let (i, j) = (h - 1, t - 1);
        l.set(i, j, l.get(i, j) - w as i128);
        l.set(i, i, l.get(i, i) + w as i128);
    }
    l
}

trait ExactRing:
    Clone + Zero + One + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv + From<i64>
{
}
impl<T> ExactRing for T where
    T: Clone + Zero + One + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv + From<i64>
{
}

/// Faddeev–LeVerrier: with `M_1 = I`, `c_{n−k} = −tr(A M_k)/k` and
/// `M_{k+1} = A M_k + c_{n−k} I`. Every division is exact over the
/// integers. Returns `None` if an intermediate overflows `T`.
fn faddeev_leverrier<T: ExactRing>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut c = vec![T::zero(); n + 1];
    c[n] = T::one();
    let mut m = vec![T::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = T::one();
    }
    let mut am = vec![T::zero(); n * n];
    for k in 1..=n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for l in 0..n {
                    let x = &a[i * n + l];
                    if x.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&x.checked_mul(&m[l * n + j])?)?;
                }
                am[i * n + j] = acc;
            }
        }
        let mut trace = T::zero();
        for i in 0..n {
            trace = trace.checked_add(&am[i * n + i])?;
        }
        let ck = T::zero()
            .checked_sub(&trace)?
            .checked_div(&T::from(k as i64))?;
        for i in 0..n {
            am[i * n + i] = am[i * n + i].checked_add(&ck)?;
        }
        c[n - k] = ck;
        std::mem::swap(&mut m, &mut am);
    }
    Some(c)
}

/// Characteristic polynomial with `i128` coefficients, if no intermediate
/// overflows.
pub(crate) fn char_poly_i128(mat: &IntMatrix) -> Option<Vec<i128>> {
    faddeev_leverrier(&mat.entries, mat.n)
}

/// Exact `det(λI − M)`, monic of degree `n`.
pub fn char_poly_exact(mat: &IntMatrix) -> IntPolynomial {
    let coeffs = match char_poly_i128(mat) {
        Some(c) => c.into_iter().map(BigInt::from).collect(),
        None => {
            let big: Vec<BigInt> = mat.entries.iter().map(|&v| BigInt::from(v)).collect();
            faddeev_leverrier(&big, mat.n).expect("BigInt arithmetic cannot overflow")
        }
    };
    IntPolynomial::from_monic_unchecked(coeffs)
}

/// Multiset of complex eigenvalues with a clustering tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<Complex64>,
    tol: f64,
}

impl Spectrum {
    /// Values are sorted by real then imaginary part.
    pub fn new(mut values: Vec<Complex64>, tol: f64) -> Self {
        sort_complex(&mut values);
        Spectrum { values, tol }
    }

    pub fn from_reals(values: &[f64], tol: f64) -> Self {
        Self::new(
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            tol,
        )
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the value closest to zero, if it lies within tolerance.
    fn zero_index(&self) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .filter(|(_, z)| z.norm() <= self.tol)
            .map(|(i, _)| i)
    }

    pub fn contains_zero(&self) -> bool {
        self.zero_index().is_some()
    }

    /// Groups values lying within `tol` of a group's first member. Returns
    /// `(mean, multiplicity)` per group in sorted order.
    pub fn clusters(&self) -> Vec<(Complex64, usize)> {
        let mut groups: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
        for &z in &self.values {
            match groups
                .iter_mut()
                .find(|(rep, _)| (rep - z).norm() <= self.tol)
            {
                Some((_, members)) => members.push(z),
                None => groups.push((z, vec![z])),
            }
        }
        groups
            .into_iter()
            .map(|(_, members)| {
                let k = members.len();
                (members.iter().sum::<Complex64>() / k as f64, k)
            })
            .collect()
    }

    /// Real parts in ascending order.
    pub fn real_parts_sorted(&self) -> Vec<f64> {
        let mut re: Vec<f64> = self.values.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        re
    }

    /// Largest distance between matched values of two spectra, pairing each
    /// value greedily with the nearest unused value of `other`. `None` if
    /// the sizes differ.
    pub fn max_distance(&self, other: &Spectrum) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let mut used = vec![false; other.len()];
        let mut worst = 0.0f64;
        for a in &self.values {
            let (j, d) = other
                .values
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, b)| (j, (a - b).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))?;
            used[j] = true;
            worst = worst.max(d);
        }
        Some(worst)
    }

    /// One `re,im` line per eigenvalue with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for z in &self.values {
            let _ = writeln!(out, "{:.16e},{:.16e}", z.re, z.im);
        }
        out
    }
}

/// Eigenvalues via the roots of the exact characteristic polynomial.
///
/// Integer eigenvalues come out exact and repeated eigenvalues are resolved
/// through the square-free factorization, so multiplicities survive to
/// within `tol`.
pub fn spectrum_numeric(mat: &IntMatrix, tol: f64) -> Result<Spectrum, SpectralError> {
    let roots = char_poly_exact(mat)
        .roots()
        .map_err(|_| SpectralError::ConvergenceFailure)?;
    Ok(Spectrum::new(roots, tol))
}

/// Eigenvalues from a dense real Schur decomposition of `M` in floating
/// point. Independent of the polynomial route; accuracy degrades to
/// `ε^(1/k)` on defective eigenvalues with Jordan blocks of size `k`.
pub fn spectrum_dense(mat: &IntMatrix, tol: f64) -> Result<Spectrum, SpectralError> {
    if mat.n() == 0 {
        return Ok(Spectrum::new(Vec::new(), tol));
    }
    let values =
        crate::poly::schur_eigenvalues(mat.to_f64()).ok_or(SpectralError::ConvergenceFailure)?;
    Ok(Spectrum::new(values, tol))
}

/// Normalized spread `(1/(n−1)) Σ |λ_i − λ̄|²` over all eigenvalues except
/// the one nearest zero, with `λ̄` their mean.
pub fn sigma_squared(s: &Spectrum) -> Result<f64, SpectralError> {
    if s.len() < 2 {
        return Err(SpectralError::TooFewEigenvalues {
            need: 2,
            got: s.len(),
        });
    }
    let zero = s
        .zero_index()
        .ok_or(SpectralError::NoZeroEigenvalue(s.tol))?;
    let rest: Vec<Complex64> = s
        .values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != zero)
        .map(|(_, &z)| z)
        .collect();
    let k = rest.len() as f64;
    let mean = rest.iter().sum::<Complex64>() / k;
    Ok(rest.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / k)
}

/// Target quantities of the spread bound for `n` vertices and `m` arcs
/// (or net arc weight).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadParameters {
    pub n: usize,
    pub m: i64,
    /// `⌊m/(n−1)⌋`
    pub kappa: i64,
    /// `⌊m/n⌋`
    pub nu: i64,
    pub sigma_min_sq: Ratio<i64>,
    /// Multiplicity of `κ` in the optimal spectrum, `(n−1)(κ+1) − m`.
    pub mult_kappa: usize,
    /// Multiplicity of `κ+1`, `m − (n−1)κ`.
    pub mult_kappa_plus_one: usize,
}

/// Panics if `n < 2`.
pub fn spread_parameters(n: usize, m: i64) -> SpreadParameters {
    assert!(n >= 2, "spread parameters need at least two vertices");
    let k = n as i64 - 1;
    let kappa = m.div_euclid(k);
    let nu = m.div_euclid(n as i64);
    let low = m - k * kappa;
    let high = k * (kappa + 1) - m;
    SpreadParameters {
        n,
        m,
        kappa,
        nu,
        sigma_min_sq: Ratio::new(low * high, k * k),
        mult_kappa: high as usize,
        mult_kappa_plus_one: low as usize,
    }
}

impl SpreadParameters {
    pub fn sigma_min_sq_f64(&self) -> f64 {
        *self.sigma_min_sq.numer() as f64 / *self.sigma_min_sq.denom() as f64
    }

    /// `(value, multiplicity)`: zero once, then `κ` and `κ+1`, omitting
    /// entries of multiplicity zero.
    pub fn optimal_multiset(&self) -> Vec<(i64, usize)> {
        [
            (0, 1),
            (self.kappa, self.mult_kappa),
            (self.kappa + 1, self.mult_kappa_plus_one),
        ]
        .into_iter()
        .filter(|&(_, k)| k > 0)
        .collect()
    }

    /// The optimal spectrum as a sorted list of `n` integers.
    pub fn optimal_values(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self
            .optimal_multiset()
            .into_iter()
            .flat_map(|(x, k)| std::iter::repeat_n(x, k))
            .collect();
        v.sort_unstable();
        v
    }

    /// `λ (λ−κ)^{(n−1)(κ+1)−m} (λ−κ−1)^{m−(n−1)κ}` expanded.
    pub fn optimal_char_poly(&self) -> IntPolynomial {
        IntPolynomial::from_roots(&self.optimal_values())
    }
}

/// Exact certificate: the Laplacian characteristic polynomial equals the
/// optimal one for the graph's `n` and net arc weight. Graphs with fewer
/// than two vertices are never optimal.
pub fn matches_optimal_spectrum(g: &DiGraph) -> bool {
    if g.n() < 2 {
        return false;
    }
    let target = spread_parameters(g.n(), g.net_weight()).optimal_char_poly();
    char_poly_exact(&laplacian(g)) == target
}

/// Root-spread inequality evaluated on one polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Report {
    pub degree: usize,
    /// Sum of the roots, read exactly from the coefficient of `x^{k−1}`.
    pub root_sum: BigInt,
    pub roots: Vec<Complex64>,
    /// `(1/k) Σ |r_i − ℓ/k|²`
    pub lhs: f64,
    /// `b(1−b)` with `b = ℓ/k − ⌊ℓ/k⌋`
    pub rhs: f64,
    pub holds: bool,
    pub equality: bool,
    /// Every root lies within the root tolerance of `⌊ℓ/k⌋` or `⌊ℓ/k⌋+1`.
    pub roots_integral_adjacent: bool,
}

pub fn theorem2_report(p: &IntPolynomial, root_tol: f64) -> Result<Theorem2Report, SpectralError> {
    let k = p.degree();
    if k == 0 {
        return Err(SpectralError::InvalidPolynomial);
    }
    let ell = -p.coeff(k - 1);
    let kb = BigInt::from(k);
    let (a, r) = ell.div_mod_floor(&kb);
    let b = r.to_f64().unwrap_or(f64::NAN) / k as f64;
    let a_f = a.to_f64().unwrap_or(f64::NAN);
    let mean = a_f + b;

    let roots = p.roots()?;
    let lhs = roots
        .iter()
        .map(|z| (z - Complex64::new(mean, 0.0)).norm_sqr())
        .sum::<f64>()
        / k as f64;
    let rhs = b * (1.0 - b);
    let roots_integral_adjacent = roots.iter().all(|z| {
        (z - Complex64::new(a_f, 0.0)).norm() <= root_tol
            || (z - Complex64::new(a_f + 1.0, 0.0)).norm() <= root_tol
    });
    Ok(Theorem2Report {
        degree: k,
        root_sum: ell,
        roots,
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-9,
        equality: (lhs - rhs).abs() <= 1e-6 * rhs.max(1.0),
        roots_integral_adjacent,
    })
}

/// Exact spectrum of an acyclic graph: its weighted in-degrees.
pub fn acyclic_spectrum(g: &DiGraph) -> Result<Spectrum, SpectralError> {
    if !g.is_acyclic() {
        return Err(SpectralError::NotAcyclic);
    }
    let deg: Vec<f64> = g.in_degrees().into_iter().map(|d| d as f64).collect();
    Ok(Spectrum::from_reals(&deg, DEFAULT_TOL))
}

/// Spectrum of the complement graph: drop one zero, map `λ ↦ n − λ`, add the
/// zero back.
pub fn complement_spectrum(s: &Spectrum, n: usize) -> Result<Spectrum, SpectralError> {
    if s.len() != n {
        return Err(SpectralError::SizeMismatch {
            expected: n,
            got: s.len(),
        });
    }
    let zero = s
        .zero_index()
        .ok_or(SpectralError::NoZeroEigenvalue(s.tol))?;
    let nf = Complex64::new(n as f64, 0.0);
    let values = s
        .values
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            if i == zero {
                Complex64::new(0.0, 0.0)
            } else {
                nf - z
            }
        })
        .collect();
    Ok(Spectrum::new(values, s.tol))
}
