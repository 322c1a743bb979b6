//! Exact integer polynomials and their numeric roots.
//!
//! Coefficients are stored constant term first. Root finding works on the
//! exact coefficients: integer roots are split off by exact division, the
//! remainder is reduced to square-free factors (Yun), and only the simple
//! roots of those factors are computed in floating point. Repeated roots
//! therefore never reach the eigensolver, so clustered eigenvalues keep full
//! double precision instead of the `ε^(1/k)` accuracy of a defective cluster.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Schur};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial has no coefficients")]
    Empty,
    #[error("bad coefficient `{0}`")]
    Parse(String),
    #[error("root finding did not converge")]
    RootFindingFailure,
}

/// Monic polynomial with arbitrary-precision integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Coefficients constant-first; trailing zeros are dropped before the
    /// monic check.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self, PolyError> {
        trim(&mut coeffs);
        match coeffs.last() {
            None => Err(PolyError::Empty),
            Some(lc) if lc.is_one() => Ok(IntPolynomial { coeffs }),
            Some(_) => Err(PolyError::NotMonic),
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub(crate) fn from_monic_unchecked(coeffs: Vec<BigInt>) -> Self {
        debug_assert!(coeffs.last().is_some_and(|c| c.is_one()));
        IntPolynomial { coeffs }
    }

    pub fn one() -> Self {
        IntPolynomial {
            coeffs: vec![BigInt::one()],
        }
    }

    /// `Π (x − r)` over the given integer roots.
    pub fn from_roots(roots: &[i64]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| {
            acc.mul(&Self {
                coeffs: vec![BigInt::from(-r), BigInt::one()],
            })
        })
    }

    /// `(x − r)^k`.
    pub fn linear_power(r: i64, k: usize) -> Self {
        Self::from_roots(&vec![r; k])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients, constant term first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn mul(&self, other: &Self) -> Self {
        IntPolynomial {
            coeffs: mul_raw(&self.coeffs, &other.coeffs),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&to_f64(&self.coeffs), z)
    }

    /// Integer roots with multiplicity, ascending, and the monic cofactor
    /// that has no integer roots.
    pub fn split_integer_roots(&self) -> (Vec<i64>, IntPolynomial) {
        let mut rest = self.coeffs.clone();
        let mut roots = Vec::new();
        let zeros = rest.iter().take_while(|c| c.is_zero()).count();
        roots.extend(std::iter::repeat_n(0, zeros));
        rest.drain(..zeros);

        if rest.len() > 1 {
            let bound = root_bound(&rest);
            let c0 = rest[0].abs();
            let limit = c0.to_f64().map_or(bound, |c| c.min(bound)) as i64;
            for r in 1..=limit {
                if rest.len() == 1 {
                    break;
                }
                if !(&c0 % BigInt::from(r)).is_zero() {
                    continue;
                }
                for cand in [r, -r] {
                    while rest.len() > 1 {
                        match divide_linear(&rest, cand) {
                            Some(q) => {
                                rest = q;
                                roots.push(cand);
                            }
                            None => break,
                        }
                    }
                }
            }
        }
        roots.sort_unstable();
        (roots, IntPolynomial { coeffs: rest })
    }

    /// Square-free decomposition `self = Π f_i^i`; returns `(f_i, i)` for the
    /// nonconstant factors. Factors are monic because `self` is.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPolynomial, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let a = self.coeffs.clone();
        let b = derivative(&a);
        let c = gcd(&a, &b);
        let mut w = exact_div(&a, &c);
        let mut y = exact_div(&b, &c);
        let mut z = sub(&y, &derivative(&w));
        let mut i = 1;
        while w.len() > 1 {
            let g = gcd(&w, &z);
            if g.len() > 1 {
                out.push((IntPolynomial::normalized(g.clone()), i));
            }
            w = exact_div(&w, &g);
            y = exact_div(&z, &g);
            z = sub(&y, &derivative(&w));
            i += 1;
        }
        out
    }

    fn normalized(mut c: Vec<BigInt>) -> Self {
        if c.last().is_some_and(|l| l.is_negative()) {
            for x in &mut c {
                *x = -&*x;
            }
        }
        IntPolynomial { coeffs: c }
    }

    /// All complex roots with multiplicity, sorted by real then imaginary
    /// part. Integer roots are exact; other roots come in exact conjugate
    /// pairs.
    pub fn roots(&self) -> Result<Vec<Complex64>, PolyError> {
        let (int_roots, rest) = self.split_integer_roots();
        let mut roots: Vec<Complex64> = int_roots
            .iter()
            .map(|&r| Complex64::new(r as f64, 0.0))
            .collect();
        for (factor, mult) in rest.squarefree_decomposition() {
            let simple = simple_roots(&to_f64(&factor.coeffs))?;
            for _ in 0..mult {
                roots.extend_from_slice(&simple);
            }
        }
        sort_complex(&mut roots);
        Ok(roots)
    }
}

impl fmt::Display for IntPolynomial {
    /// Coefficients from constant to leading, space separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for IntPolynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs = s
            .split_whitespace()
            .map(|t| BigInt::from_str(t).map_err(|_| PolyError::Parse(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(coeffs)
    }
}

pub(crate) fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

fn trim(c: &mut Vec<BigInt>) {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
}

fn to_f64(c: &[BigInt]) -> Vec<f64> {
    c.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn mul_raw(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = (0..a.len().max(b.len()))
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    trim(&mut out);
    out
}

fn derivative(a: &[BigInt]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    trim(&mut out);
    out
}

/// Quotient by `x − r` if the division is exact.
fn divide_linear(a: &[BigInt], r: i64) -> Option<Vec<BigInt>> {
    let r = BigInt::from(r);
    let mut q = vec![BigInt::zero(); a.len() - 1];
    let mut carry = BigInt::zero();
    for i in (0..a.len()).rev() {
        let v = &a[i] + &carry * &r;
        if i == 0 {
            return v.is_zero().then_some(q);
        }
        q[i - 1] = v.clone();
        carry = v;
    }
    unreachable!()
}

fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn primitive_part(a: &[BigInt]) -> Vec<BigInt> {
    let c = content(a);
    if c.is_zero() || c.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x / &c).collect()
}

/// Pseudo-remainder of `a` by `b` (`b` nonzero).
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for x in r.iter_mut() {
            *x *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &lr * bj;
        }
        trim(&mut r);
    }
    r
}

/// Primitive gcd with positive leading coefficient.
fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (mut a, mut b) = (primitive_part(a), primitive_part(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = pseudo_rem(&a, &b);
        a = b;
        b = if r.is_empty() { r } else { primitive_part(&r) };
    }
    if a.is_empty() {
        return vec![BigInt::one()];
    }
    IntPolynomial::normalized(a).coeffs
}

/// Quotient of an exact division whose result has integer coefficients.
fn exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() {
        return Vec::new();
    }
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let (coef, rem) = r[i + db].div_rem(lb);
        debug_assert!(rem.is_zero(), "inexact polynomial division");
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &coef * bj;
        }
        q[i] = coef;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()), "nonzero remainder");
    q
}

/// Upper bound on root moduli (Fujiwara) for a polynomial with nonzero
/// leading coefficient.
fn root_bound(c: &[BigInt]) -> f64 {
    let k = c.len() - 1;
    let lc = c[k].abs().to_f64().unwrap_or(f64::INFINITY);
    let mut b: f64 = 0.0;
    for i in 1..=k {
        let ratio = c[k - i].abs().to_f64().unwrap_or(f64::INFINITY) / lc;
        let term = if i == k {
            (ratio / 2.0).powf(1.0 / i as f64)
        } else {
            ratio.powf(1.0 / i as f64)
        };
        b = b.max(term);
    }
    (2.0 * b).ceil()
}

/// Roots of a square-free real polynomial; conjugate pairs are exact.
fn simple_roots(c: &[f64]) -> Result<Vec<Complex64>, PolyError> {
    let k = c.len() - 1;
    let lc = c[k];
    let mut raw: Vec<Complex64> = match k {
        0 => return Ok(Vec::new()),
        1 => vec![Complex64::new(-c[0] / lc, 0.0)],
        2 => {
            let (a, b, cc) = (lc, c[1], c[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc >= 0.0 {
                let s = disc.sqrt();
                let q = -0.5 * (b + b.signum() * s);
                if q == 0.0 {
                    vec![Complex64::new(0.0, 0.0); 2]
                } else {
                    vec![Complex64::new(q / a, 0.0), Complex64::new(cc / q, 0.0)]
                }
            } else {
                let re = -b / (2.0 * a);
                let im = (-disc).sqrt() / (2.0 * a.abs());
                vec![Complex64::new(re, im), Complex64::new(re, -im)]
            }
        }
        _ => {
            let mut comp = DMatrix::<f64>::zeros(k, k);
            for i in 1..k {
                comp[(i, i - 1)] = 1.0;
            }
            for i in 0..k {
                comp[(i, k - 1)] = -c[i] / lc;
            }
            match schur_eigenvalues(comp) {
                Some(z) => z,
                None => aberth(c)?,
            }
        }
    };
    if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(PolyError::RootFindingFailure);
    }

    let upper: Vec<Complex64> = raw.iter().copied().filter(|z| z.im > 0.0).collect();
    let lower = raw.iter().filter(|z| z.im < 0.0).count();
    if upper.len() == lower {
        let dc: Vec<f64> = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| a * i as f64)
            .collect();
        let reals = raw
            .iter()
            .filter(|z| z.im == 0.0)
            .map(|z| polish(c, &dc, *z));
        let pairs: Vec<Complex64> = upper.iter().map(|&z| polish(c, &dc, z)).collect();
        raw = reals
            .chain(pairs.iter().copied())
            .chain(pairs.iter().map(|z| z.conj()))
            .map(|z| {
                if z.im == 0.0 {
                    Complex64::new(z.re, 0.0)
                } else {
                    z
                }
            })
            .collect();
    }
    Ok(raw)
}

/// Eigenvalues of a real square matrix read off its real Schur form. The
/// 2×2 diagonal blocks are solved here rather than by nalgebra, which yields
/// a NaN imaginary part when a block holds a repeated real eigenvalue.
pub(crate) fn schur_eigenvalues(m: DMatrix<f64>) -> Option<Vec<Complex64>> {
    let k = m.nrows();
    let (_, t) = Schur::try_new(m, f64::EPSILON, 10_000)?.unpack();
    let mut out = Vec::with_capacity(k);
    let mut i = 0;
    while i < k {
        if i + 1 < k && t[(i + 1, i)] != 0.0 {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half = 0.5 * (a + d);
            let disc = 0.25 * (a - d) * (a - d) + b * c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                out.push(Complex64::new(half + s, 0.0));
                out.push(Complex64::new(half - s, 0.0));
            } else {
                let s = (-disc).sqrt();
                out.push(Complex64::new(half, s));
                out.push(Complex64::new(half, -s));
            }
            i += 2;
        } else {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    Some(out)
}

/// Aberth–Ehrlich simultaneous iteration; fallback for companion matrices
/// on which the QR iteration stalls.
fn aberth(c: &[f64]) -> Result<Vec<Complex64>, PolyError> {
    let k = c.len() - 1;
    let lc = c[k];
    let c: Vec<f64> = c.iter().map(|x| x / lc).collect();
    let dc: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect();
    let radius = c[..k].iter().map(|a| a.abs()).fold(0.0, f64::max) + 1.0;
    let mut z: Vec<Complex64> = (0..k)
        .map(|j| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * j as f64 / k as f64))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for j in 0..k {
            let ratio = horner(&c, z[j]) / horner(&dc, z[j]);
            let repulsion: Complex64 = (0..k)
                .filter(|&i| i != j)
                .map(|i| (z[j] - z[i]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[j] -= step;
                moved = moved.max(step.norm() / z[j].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for w in &mut z {
        if w.im.abs() <= 1e-12 * w.norm().max(1.0) {
            w.im = 0.0;
        }
    }
    // pair each upper root with its mirror so conjugates are exact
    let mut out: Vec<Complex64> = z.iter().copied().filter(|w| w.im == 0.0).collect();
    let upper: Vec<Complex64> = z.iter().copied().filter(|w| w.im > 0.0).collect();
    if upper.len() * 2 + out.len() != k {
        return Err(PolyError::RootFindingFailure);
    }
    out.extend(upper.iter().copied());
    out.extend(upper.iter().map(|w| w.conj()));
    Ok(out)
}

/// A few Newton steps, keeping the best iterate.
fn polish(c: &[f64], dc: &[f64], z0: Complex64) -> Complex64 {
    let real = z0.im == 0.0;
    let mut best = z0;
    let mut best_res = horner(c, z0).norm();
    let mut z = z0;
    for _ in 0..4 {
        let d = horner(dc, z);
        if d.norm() == 0.0 {
            break;
        }
        z -= horner(c, z) / d;
        if real {
            z.im = 0.0;
        }
        let res = horner(c, z).norm();
        if res < best_res {
            best = z;
            best_res = res;
        } else {
            break;
        }
    }
    best
}
