//! Seeded random matrices. Every stream is a ChaCha8 generator derived from an
//! explicit `(seed, stream)` pair, so samples are reproducible across runs and
//! independent of evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{Square, SymMatrix};
use crate::scalar::Scalar;

/// Generator for sample `stream` of a run seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Householder QR of a square matrix: returns `(Q, R)` with `Q` orthogonal.
pub fn householder_qr<T: Scalar>(a: &Square<T>) -> (Square<T>, Square<T>) {
    let n = a.n();
    let mut r = a.clone();
    let mut q = Square::<T>::identity(n);
    for k in 0..n.saturating_sub(1) {
        let norm = (k..n).fold(T::zero(), |acc, i| acc + r[(i, k)] * r[(i, k)]).sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if r[(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (0..n).map(|i| if i < k { T::zero() } else { r[(i, k)] }).collect();
        v[k] -= alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        // R ← (I − 2vvᵗ/|v|²) R
        for j in 0..n {
            let dot = (k..n).fold(T::zero(), |acc, i| acc + v[i] * r[(i, j)]);
            let f = two * dot / vnorm2;
            for i in k..n {
                r[(i, j)] -= f * v[i];
            }
        }
        // Q ← Q (I − 2vvᵗ/|v|²)
        for i in 0..n {
            let dot = (k..n).fold(T::zero(), |acc, j| acc + q[(i, j)] * v[j]);
            let f = two * dot / vnorm2;
            for j in k..n {
                q[(i, j)] -= f * v[j];
            }
        }
    }
    (q, r)
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// columns of `Q` sign-fixed so that `diag(R) > 0`.
pub fn random_orthogonal<T: Scalar>(n: usize, seed: u64) -> Square<T> {
    let mut rng = rng_for(seed, 0x6f72_7468);
    random_orthogonal_with(n, &mut rng)
}

pub fn random_orthogonal_with<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Square<T> {
    let g = Square::from_fn(n, |_, _| gaussian::<T, _>(rng));
    let (mut q, r) = householder_qr(&g);
    for j in 0..n {
        if r[(j, j)] < T::zero() {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// `Q·diag(exp(u))·Qᵗ` with `Q` Haar and `uᵢ` uniform on `[−spread, spread]`.
pub fn random_spd<T: Scalar>(n: usize, seed: u64, spread: f64) -> SymMatrix<T> {
    let mut rng = rng_for(seed, 0x0073_7064);
    random_spd_with(n, spread, &mut rng)
}

pub fn random_spd_with<T: Scalar, R: Rng + ?Sized>(n: usize, spread: f64, rng: &mut R) -> SymMatrix<T> {
    assert!(spread >= 0.0 && spread.is_finite(), "spread must be finite and nonnegative");
    let q = random_orthogonal_with::<T, _>(n, rng);
    let diag: Vec<T> = (0..n)
        .map(|_| {
            let u = if spread > 0.0 { rng.gen_range(-spread..=spread) } else { 0.0 };
            T::lit(u.exp())
        })
        .collect();
    SymMatrix::diagonal(&diag).congruence(&q)
}

/// Symmetric matrix with i.i.d. standard Gaussian upper-triangle entries.
pub fn random_symmetric_with<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymMatrix<T> {
    SymMatrix::from_fn(n, |_, _| gaussian::<T, _>(rng))
}

/// Random trace-free symmetric direction of unit Frobenius norm.
pub fn random_trace_free_with<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymMatrix<T> {
    let s = random_symmetric_with::<T, _>(n, rng);
    let s = s.shift(-s.trace() / T::from_count(n));
    let norm = s.frobenius_norm();
    if norm == T::zero() {
        s
    } else {
        s.scale(T::one() / norm)
    }
}

/// Positive vector with log-uniform coordinates in `[e^−spread, e^spread]`.
pub fn random_positive_vector_with<T: Scalar, R: Rng + ?Sized>(n: usize, spread: f64, rng: &mut R) -> Vec<T> {
    (0..n).map(|_| T::lit(rng.gen_range(-spread..=spread).exp())).collect()
}
