//! Sparse multivariate polynomials over a [`Scalar`] and coefficient recovery
//! from black-box evaluation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficients at or below this magnitude are dropped on construction.
pub const PRUNE_THRESHOLD: f64 = 1e-13;

/// Exponent vector `α`. Ordered graded-lexicographically: total degree first,
/// then the first differing exponent (so `x₁² > x₁x₂ > x₂²`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Wire form of one term: `{"alpha": [...], "coeff": x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, PartialEq)]
pub struct SparsePoly<T: Scalar = f64> {
    nvars: usize,
    terms: BTreeMap<Exponent, T>,
}

impl<T: Scalar> SparsePoly<T> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::from_map(nvars, BTreeMap::from([(Exponent(vec![0; nvars]), c)]))
    }

    /// The coordinate function `xᵢ`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut alpha = vec![0; nvars];
        alpha[i] = 1;
        Self::from_map(nvars, BTreeMap::from([(Exponent(alpha), T::one())]))
    }

    /// Sums repeated exponents, then prunes.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, T)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: alpha.len() });
            }
            *map.entry(Exponent(alpha)).or_insert(T::zero()) += c;
        }
        Ok(Self::from_map(nvars, map))
    }

    pub fn from_term_list(nvars: usize, terms: &[PolyTerm]) -> Result<Self> {
        Self::from_terms(nvars, terms.iter().map(|t| (t.alpha.clone(), T::lit(t.coeff))))
    }

    fn from_map(nvars: usize, mut terms: BTreeMap<Exponent, T>) -> Self {
        let thr = T::lit(PRUNE_THRESHOLD);
        terms.retain(|_, c| c.abs() > thr);
        Self { nvars, terms }
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Max total degree over stored terms; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().next_back().map_or(0, Exponent::degree)
    }

    /// `(min, max)` total degree over stored terms.
    pub fn degree_range(&self) -> (usize, usize) {
        let min = self.terms.keys().next().map_or(0, Exponent::degree);
        (min, self.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        let (lo, hi) = self.degree_range();
        lo == hi
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], T)> + '_ {
        self.terms.iter().rev().map(|(a, &c)| (a.0.as_slice(), c))
    }

    pub fn coeff(&self, alpha: &[u32]) -> T {
        self.terms.get(&Exponent(alpha.to_vec())).copied().unwrap_or(T::zero())
    }

    pub fn max_abs_coeff(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, c| acc.max(c.abs()))
    }

    /// Smallest coefficient, or zero for the zero polynomial.
    pub fn min_coeff(&self) -> T {
        self.terms
            .values()
            .copied()
            .fold(None, |acc: Option<T>, c| Some(acc.map_or(c, |a| a.min(c))))
            .unwrap_or(T::zero())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: len });
        }
        Ok(())
    }

    /// `Σ a_α x^α`.
    pub fn eval(&self, x: &[T]) -> Result<T> {
        self.check_len(x.len())?;
        let mut acc = T::zero();
        for (alpha, &c) in &self.terms {
            let mut m = c;
            for (&xi, &e) in x.iter().zip(&alpha.0) {
                if e > 0 {
                    m *= xi.powi(e as i32);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    fn zip_with(&self, other: &Self, sign: T) -> Result<Self> {
        self.check_len(other.nvars)?;
        let mut map = self.terms.clone();
        for (a, &c) in &other.terms {
            *map.entry(a.clone()).or_insert(T::zero()) += sign * c;
        }
        Ok(Self::from_map(self.nvars, map))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, -T::one())
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_map(self.nvars, self.terms.iter().map(|(a, &c)| (a.clone(), s * c)).collect())
    }

    /// Drops the terms with `|coeff| ≤ threshold`, e.g. the recovery noise of
    /// an interpolated polynomial.
    pub fn chop(&self, threshold: T) -> Self {
        let terms = self.terms.iter().filter(|(_, c)| c.abs() > threshold).map(|(a, &c)| (a.clone(), c)).collect();
        Self { nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_len(other.nvars)?;
        let mut map: BTreeMap<Exponent, T> = BTreeMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let alpha = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                *map.entry(Exponent(alpha)).or_insert(T::zero()) += ca * cb;
            }
        }
        Ok(Self::from_map(self.nvars, map))
    }

    /// `∂p/∂xᵢ`.
    pub fn partial(&self, i: usize) -> Self {
        let mut map = BTreeMap::new();
        for (a, &c) in &self.terms {
            let e = a.0[i];
            if e == 0 {
                continue;
            }
            let mut alpha = a.0.clone();
            alpha[i] -= 1;
            *map.entry(Exponent(alpha)).or_insert(T::zero()) += c * T::from_count(e as usize);
        }
        Self::from_map(self.nvars, map)
    }

    /// `Σⱼ aⱼ ∂p/∂xⱼ`.
    pub fn directional_derivative(&self, a: &[T]) -> Result<Self> {
        self.check_len(a.len())?;
        let mut map: BTreeMap<Exponent, T> = BTreeMap::new();
        for (j, &aj) in a.iter().enumerate() {
            if aj == T::zero() {
                continue;
            }
            for (alpha, &c) in &self.terms {
                let e = alpha.0[j];
                if e == 0 {
                    continue;
                }
                let mut beta = alpha.0.clone();
                beta[j] -= 1;
                *map.entry(Exponent(beta)).or_insert(T::zero()) += aj * c * T::from_count(e as usize);
            }
        }
        Ok(Self::from_map(self.nvars, map))
    }

    pub fn to_term_list(&self) -> Vec<PolyTerm> {
        self.terms().map(|(a, c)| PolyTerm { alpha: a.to_vec(), coeff: c.to_f64_lossy() }).collect()
    }
}

impl<T: Scalar> fmt::Debug for SparsePoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &e) in alpha.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·x{}", i + 1)?,
                    _ => write!(f, "·x{}^{e}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Serialize for SparsePoly<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_term_list().serialize(serializer)
    }
}

/// Converts Newton coefficients on the nodes `0, 1, …, m−1` into monomial
/// coefficients, in place.
fn newton_to_monomial<T: Scalar>(c: &mut [T]) {
    let m = c.len();
    let mut out = vec![T::zero(); m];
    out[0] = c[m - 1];
    for (len, k) in (1..).zip((0..m - 1).rev()) {
        // out ← out·(x − k) + c[k]
        let node = T::from_count(k);
        let mut shifted = vec![T::zero(); len + 1];
        for (d, &v) in out[..len].iter().enumerate() {
            shifted[d + 1] += v;
            shifted[d] -= node * v;
        }
        shifted[0] += c[k];
        out[..=len].copy_from_slice(&shifted);
    }
    c.copy_from_slice(&out);
}

/// Divided differences on the integer nodes `0, 1, …, m−1`, in place.
fn divided_differences<T: Scalar>(v: &mut [T]) {
    let m = v.len();
    for k in 1..m {
        let step = T::from_count(k);
        for i in (k..m).rev() {
            v[i] = (v[i] - v[i - 1]) / step;
        }
    }
}

/// Recovers the polynomial of total degree ≤ `degree` in `nvars` variables
/// that agrees with `f` on the tensor grid `{0, 1, …, degree}ⁿ`, by iterated
/// univariate Newton interpolation along each axis.
pub fn coefficients_from_evaluator<T: Scalar>(f: impl FnMut(&[T]) -> T, degree: usize, nvars: usize) -> SparsePoly<T> {
    let nodes: Vec<T> = (0..=degree).map(T::from_count).collect();
    tensor_recover(f, degree, nvars, &nodes, |line| {
        divided_differences(line);
        newton_to_monomial(line);
    })
}

/// Same contract as [`coefficients_from_evaluator`], sampling instead on the
/// tensor grid of `degree + 1` Chebyshev nodes in `[−1, 1]` per axis. Far
/// better conditioned at high degree or many variables.
pub fn chebyshev_coefficients_from_evaluator<T: Scalar>(
    f: impl FnMut(&[T]) -> T,
    degree: usize,
    nvars: usize,
) -> SparsePoly<T> {
    let m = degree + 1;
    let nodes_f64: Vec<f64> = (0..m).map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos()).collect();
    // row k of `to_cheb`: DCT weights giving the coefficient of Tₖ
    let mut to_cheb = vec![vec![0.0; m]; m];
    for (k, row) in to_cheb.iter_mut().enumerate() {
        for (j, w) in row.iter_mut().enumerate() {
            let scale = if k == 0 { 1.0 } else { 2.0 };
            *w = scale / m as f64 * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / m as f64).cos();
        }
    }
    // column k of `to_mono`: monomial coefficients of Tₖ
    let mut to_mono = vec![vec![0.0; m]; m];
    let mut prev = vec![0.0; m];
    let mut curr = vec![0.0; m];
    curr[0] = 1.0;
    for k in 0..m {
        if k == 1 {
            prev = std::mem::replace(&mut curr, vec![0.0; m]);
            curr[1] = 1.0;
        } else if k > 1 {
            let mut next = vec![0.0; m];
            for d in 0..m - 1 {
                next[d + 1] += 2.0 * curr[d];
            }
            for d in 0..m {
                next[d] -= prev[d];
            }
            prev = std::mem::replace(&mut curr, next);
        }
        for d in 0..m {
            to_mono[d][k] = curr[d];
        }
    }
    let combined: Vec<Vec<T>> =
        (0..m).map(|d| (0..m).map(|j| T::lit((0..m).map(|k| to_mono[d][k] * to_cheb[k][j]).sum())).collect()).collect();
    let nodes: Vec<T> = nodes_f64.iter().map(|&u| T::lit(u)).collect();
    tensor_recover(f, degree, nvars, &nodes, |line| {
        let values = line.to_vec();
        for (d, slot) in line.iter_mut().enumerate() {
            *slot = combined[d].iter().zip(&values).fold(T::zero(), |acc, (&w, &v)| acc + w * v);
        }
    })
}

/// Samples `f` on `nodesⁿ`, maps every axis line from values to monomial
/// coefficients with `line_transform`, and keeps the terms of total degree ≤ `degree`.
fn tensor_recover<T: Scalar>(
    mut f: impl FnMut(&[T]) -> T,
    degree: usize,
    nvars: usize,
    nodes: &[T],
    mut line_transform: impl FnMut(&mut [T]),
) -> SparsePoly<T> {
    let m = degree + 1;
    let total = m.pow(nvars as u32);
    let mut point = vec![T::zero(); nvars];
    let mut grid = Vec::with_capacity(total);
    // index = Σ αᵢ·m^(n−1−i): the first variable varies slowest
    for idx in 0..total {
        let mut rem = idx;
        for i in (0..nvars).rev() {
            point[i] = nodes[rem % m];
            rem /= m;
        }
        grid.push(f(&point));
    }

    let mut line = vec![T::zero(); m];
    for axis in 0..nvars {
        let stride = m.pow((nvars - 1 - axis) as u32);
        for base in 0..total {
            if !(base / stride).is_multiple_of(m) {
                continue;
            }
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = grid[base + k * stride];
            }
            line_transform(&mut line);
            for (k, &v) in line.iter().enumerate() {
                grid[base + k * stride] = v;
            }
        }
    }

    let mut terms = BTreeMap::new();
    for (idx, &c) in grid.iter().enumerate() {
        let mut rem = idx;
        let mut alpha = vec![0u32; nvars];
        for i in (0..nvars).rev() {
            alpha[i] = (rem % m) as u32;
            rem /= m;
        }
        if alpha.iter().map(|&e| e as usize).sum::<usize>() <= degree {
            terms.insert(Exponent(alpha), c);
        }
    }
    SparsePoly::from_map(nvars, terms)
}

/// Coefficient recovery for a polynomial known to be homogeneous of degree
/// `degree`: recovers the dehomogenization `y ↦ f(y, 1)` in `n − 1`
/// variables on the Chebyshev tensor grid and rehomogenizes with the last
/// variable.
pub fn homogeneous_coefficients_from_evaluator<T: Scalar>(
    mut f: impl FnMut(&[T]) -> T,
    degree: usize,
    nvars: usize,
) -> SparsePoly<T> {
    if nvars == 0 {
        return SparsePoly::constant(0, f(&[]));
    }
    let mut point = vec![T::one(); nvars];
    let q = chebyshev_coefficients_from_evaluator(
        |y: &[T]| {
            point[..nvars - 1].copy_from_slice(y);
            point[nvars - 1] = T::one();
            f(&point)
        },
        degree,
        nvars - 1,
    );
    let terms = q.terms.into_iter().map(|(beta, c)| {
        let mut alpha = beta.0;
        let rest = degree - alpha.iter().map(|&e| e as usize).sum::<usize>();
        alpha.push(rest as u32);
        (Exponent(alpha), c)
    });
    SparsePoly::from_map(nvars, terms.collect())
}
