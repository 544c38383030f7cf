//! Dense symmetric matrices, the Jacobi eigensolver, and the complex-structure
//! split used by the Lagrangian Monge-Ampère operator.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major square matrix. Used for orthogonal changes of basis,
/// eigenvector bases and products of symmetric matrices.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Square<T: Scalar = f64> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Square<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "square matrix product dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// `max |hᵗh − I|` over entries.
    pub fn orthogonality_defect(&self) -> T {
        let g = self.transpose().mul(self);
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> T {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot =
                (col..n).max_by(|&r, &s| a[r * n + col].abs().partial_cmp(&a[s * n + col].abs()).unwrap()).unwrap();
            if a[pivot * n + col] == T::zero() {
                return T::zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in (col + 1)..n {
                let f = a[r * n + col] / p;
                if f == T::zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        det
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }
}

impl<T: Scalar> Index<(usize, usize)> for Square<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Square<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Scalar> fmt::Debug for Square<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.n)).finish()
    }
}

/// Real symmetric `n × n` matrix stored as its upper triangle, row-major
/// (`a₁₁, a₁₂, …, a₁ₙ, a₂₂, …, aₙₙ`). This packed order is also the order of
/// the entry variables of symbolic operators.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix<T: Scalar = f64> {
    n: usize,
    upper: Vec<T>,
}

/// Number of independent entries of an `n × n` symmetric matrix.
#[inline]
pub const fn entry_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of `(i, j)` (any order) in the packed upper triangle.
#[inline]
pub fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Inverse of [`packed_index`]: the `(i, j)` with `i ≤ j` stored at `k`.
pub fn packed_position(n: usize, k: usize) -> (usize, usize) {
    let mut start = 0;
    for i in 0..n {
        let len = n - i;
        if k < start + len {
            return (i, i + (k - start));
        }
        start += len;
    }
    panic!("packed index {k} out of range for n = {n}");
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, upper: vec![T::zero(); entry_count(n)] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, T::one())
    }

    pub fn scalar(n: usize, c: T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds from packed upper-triangle entries.
    pub fn from_entries(n: usize, upper: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if upper.len() != entry_count(n) {
            return Err(Error::DimensionMismatch { expected: entry_count(n), found: upper.len() });
        }
        Ok(Self { n, upper })
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut upper = Vec::with_capacity(entry_count(n));
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        Self { n, upper }
    }

    /// Ingests a full grid, rejecting asymmetry above `tol` (relative to the
    /// entry magnitude, floored at 1), then keeps the upper triangle.
    pub fn from_rows(rows: &[Vec<T>], tol: T) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                let scale = T::one().max(a.abs()).max(b.abs());
                if !((a - b).abs() <= tol * scale) {
                    return Err(Error::NotSymmetric { row: i, col: j, defect: (a - b).abs().to_f64_lossy() });
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    /// Symmetric part `(M + Mᵗ)/2` of a square matrix.
    pub fn symmetric_part(m: &Square<T>) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(m.n(), |i, j| if i == j { m[(i, i)] } else { half * (m[(i, j)] + m[(j, i)]) })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.upper[packed_index(self.n, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = packed_index(self.n, i, j);
        self.upper[k] = v;
    }

    /// Packed upper-triangle entries (the entry-variable vector).
    #[inline]
    pub fn entries(&self) -> &[T] {
        &self.upper
    }

    pub fn to_square(&self) -> Square<T> {
        Square::from_fn(self.n, |i, j| self.get(i, j))
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn frobenius_norm(&self) -> T {
        self.dot(self).sqrt()
    }

    /// Trace inner product `⟨A, B⟩ = tr(AB)`.
    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.n, other.n);
        let two = T::lit(2.0);
        let mut acc = T::zero();
        let mut k = 0;
        for i in 0..self.n {
            for j in i..self.n {
                let p = self.upper[k] * other.upper[k];
                acc += if i == j { p } else { two * p };
                k += 1;
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.upper.iter().zip(&other.upper).fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    pub fn map_entries(&self, f: impl Fn(T) -> T) -> Self {
        Self { n: self.n, upper: self.upper.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map_entries(|x| c * x)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, upper: self.upper.iter().zip(&other.upper).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, upper: self.upper.iter().zip(&other.upper).map(|(&a, &b)| a - b).collect() }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: T, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, upper: self.upper.iter().zip(&other.upper).map(|(&a, &b)| a + c * b).collect() }
    }

    /// `self + s·I`.
    pub fn shift(&self, s: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let v = out.get(i, i);
            out.set(i, i, v + s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Square<T> {
        self.to_square().mul(&other.to_square())
    }

    /// Congruence `h·A·hᵗ`, symmetrized.
    pub fn congruence(&self, h: &Square<T>) -> Self {
        assert_eq!(self.n, h.n());
        let full = h.mul(&self.to_square()).mul(&h.transpose());
        Self::symmetric_part(&full)
    }

    /// Congruence `hᵗ·A·h`, symmetrized.
    pub fn congruence_transpose(&self, h: &Square<T>) -> Self {
        self.congruence(&h.transpose())
    }

    pub fn cast<U: Scalar>(&self) -> SymMatrix<U> {
        SymMatrix { n: self.n, upper: self.upper.iter().map(|&x| U::lit(x.to_f64_lossy())).collect() }
    }
}

impl<T: Scalar> fmt::Debug for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// `A = basis · diag(eigenvalues) · basisᵗ`, eigenvalues nonincreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition<T: Scalar = f64> {
    pub eigenvalues: Vec<T>,
    pub basis: Square<T>,
}

impl<T: Scalar> SpectralDecomposition<T> {
    /// `basis · diag(f(λ)) · basisᵗ`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> SymMatrix<T> {
        let n = self.basis.n();
        let mapped: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        SymMatrix::from_fn(n, |i, j| {
            (0..n).fold(T::zero(), |acc, k| acc + self.basis[(i, k)] * mapped[k] * self.basis[(j, k)])
        })
    }

    pub fn reconstruct(&self) -> SymMatrix<T> {
        self.apply(|l| l)
    }

    pub fn min_eigenvalue(&self) -> T {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver. Each rotation annihilates one off-diagonal
/// pair; sweeps repeat until the off-diagonal mass is negligible against the
/// Frobenius norm.
pub fn sym_eigen<T: Scalar>(a: &SymMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let n = a.n();
    let mut w = a.to_square();
    let mut v = Square::<T>::identity(n);
    let scale = a.frobenius_norm();
    let stop = T::epsilon() * T::lit(1e-3) * scale;

    let mut converged = n < 2 || scale == T::zero();
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweep += 1;
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += w[(p, q)] * w[(p, q)];
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (T::lit(2.0) * apq);
                let t = if theta.is_infinite() {
                    T::one() / (T::lit(2.0) * theta)
                } else {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (w[(k, p)], w[(k, q)]);
                    w[(k, p)] = c * akp - s * akq;
                    w[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (w[(p, k)], w[(q, k)]);
                    w[(p, k)] = c * apk - s * aqk;
                    w[(q, k)] = s * apk + c * aqk;
                }
                w[(p, q)] = T::zero();
                w[(q, p)] = T::zero();
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        converged = sweep >= 1 && {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += w[(p, q)] * w[(p, q)];
                }
            }
            off.sqrt() <= stop
        };
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].partial_cmp(&w[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&i| w[(i, i)]).collect();
    let basis = Square::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(SpectralDecomposition { eigenvalues, basis })
}

/// Sum of `ln λ` over the spectrum; `None` unless every eigenvalue is positive.
pub fn log_det_spd<T: Scalar>(a: &SymMatrix<T>) -> Result<Option<T>> {
    let eig = sym_eigen(a)?;
    if eig.min_eigenvalue() <= T::zero() {
        return Ok(None);
    }
    Ok(Some(eig.eigenvalues.iter().fold(T::zero(), |acc, &l| acc + l.ln())))
}

/// The standard complex structure on ℝ²ᵐ pairing consecutive coordinates:
/// `J e₂ᵢ = e₂ᵢ₊₁`, `J e₂ᵢ₊₁ = −e₂ᵢ` (0-based).
pub fn complex_structure<T: Scalar>(n: usize) -> Result<Square<T>> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    let mut j = Square::zeros(n);
    for i in 0..n / 2 {
        j[(2 * i + 1, 2 * i)] = T::one();
        j[(2 * i, 2 * i + 1)] = -T::one();
    }
    Ok(j)
}

/// Skew-hermitian part `A_sk = ½(A + JAJ)` relative to [`complex_structure`]
/// and the `m = n/2` nonnegative eigenvalues of `A_sk`, nonincreasing.
///
/// `A_sk` anticommutes with `J`, so its spectrum is `±μ₁, …, ±μₘ`; the returned
/// `μⱼ` average each pair to cancel the asymmetric rounding.
pub fn skew_hermitian_part<T: Scalar>(a: &SymMatrix<T>) -> Result<(SymMatrix<T>, Vec<T>)> {
    let n = a.n();
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    // J has one nonzero per row: row r holds `sign(r)` at column `partner(r)`,
    // hence (JAJ)ᵢⱼ = −sign(i)·sign(j)·A[partner(i)][partner(j)].
    let partner = |r: usize| r ^ 1;
    let sign = |r: usize| if r.is_multiple_of(2) { -T::one() } else { T::one() };
    let half = T::lit(0.5);
    let a_sk = SymMatrix::from_fn(n, |i, j| {
        let jaj = -(sign(i) * sign(j)) * a.get(partner(i), partner(j));
        half * (a.get(i, j) + jaj)
    });
    let eig = sym_eigen(&a_sk)?;
    let m = n / 2;
    let nonneg = (0..m).map(|i| (half * (eig.eigenvalues[i] - eig.eigenvalues[n - 1 - i])).max(T::zero())).collect();
    Ok((a_sk, nonneg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn packed_layout_round_trips() {
        for n in 1..7 {
            for k in 0..entry_count(n) {
                let (i, j) = packed_position(n, k);
                assert_eq!(packed_index(n, i, j), k);
                assert_eq!(packed_index(n, j, i), k);
            }
        }
    }

    #[test]
    fn identity_spectrum() {
        let eig = sym_eigen(&SymMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert!(eig.basis.orthogonality_defect() < 1e-15);
    }

    #[test]
    fn diagonal_is_sorted() {
        let eig = sym_eigen(&SymMatrix::diagonal(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn swap_matrix() {
        let a = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1e-12).unwrap();
        let eig = sym_eigen(&a).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eig.eigenvalues[1], -1.0, epsilon = 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // eigenvectors up to sign
        let c0 = eig.basis.column(0);
        let c1 = eig.basis.column(1);
        assert_abs_diff_eq!((c0[0] * r + c0[1] * r).abs(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!((c1[0] * r - c1[1] * r).abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_asymmetric_literal() {
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]], 1e-12).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { row: 0, col: 1, .. }));
        // within tolerance: upper triangle wins
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-13, 1.0]], 1e-12).unwrap();
        assert_eq!(a.get(1, 0), 2.0);
    }

    #[test]
    fn skew_part_of_identity_vanishes() {
        let (sk, eigs) = skew_hermitian_part(&SymMatrix::<f64>::identity(2)).unwrap();
        assert_eq!(sk, SymMatrix::zeros(2));
        assert_eq!(eigs, vec![0.0]);
    }

    #[test]
    fn skew_part_two_by_two() {
        let (a, b, c) = (1.7, -0.4, 0.3);
        let m = SymMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => a,
            (0, 1) => b,
            _ => c,
        });
        let (_, eigs) = skew_hermitian_part(&m).unwrap();
        let expected = (((a - c) / 2.0f64).powi(2) + b * b).sqrt();
        assert_abs_diff_eq!(eigs[0], expected, epsilon = 1e-14);
    }

    #[test]
    fn skew_part_rejects_odd_dimension() {
        assert_eq!(skew_hermitian_part(&SymMatrix::<f64>::identity(3)).unwrap_err(), Error::OddDimension(3));
    }

    #[test]
    fn works_in_single_precision() {
        let a = SymMatrix::<f32>::from_fn(3, |i, j| (i + 2 * j) as f32 * 0.25);
        let eig = sym_eigen(&a).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&a) < 1e-5);
    }

    #[test]
    fn determinant_by_elimination() {
        let m = Square::from_rows(&[vec![2.0, 1.0], vec![4.0, 3.0]]).unwrap();
        assert_abs_diff_eq!(m.det(), 2.0, epsilon = 1e-15);
    }
}
