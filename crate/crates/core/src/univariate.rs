//! Univariate machinery behind Gårding eigenvalues: Chebyshev-node
//! interpolation of `t ↦ g(tB + A)` and real-root extraction from a balanced
//! companion matrix.

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};

/// Extra abscissae (in the scaled variable) used to audit an interpolant.
const AUDIT_POINTS: [f64; 2] = [0.372_104_9, -0.812_337_1];

/// Relative audit residual above which the sampled function is not a
/// polynomial of the declared degree.
pub const NOT_POLYNOMIAL_TOL: f64 = 1e-7;

/// Monomial coefficients of an interpolant in the scaled variable `u = t / radius`.
#[derive(Clone, Debug)]
pub struct Interpolant {
    /// `coeffs[k]` multiplies `uᵏ`.
    pub coeffs: Vec<f64>,
    pub radius: f64,
    /// Max relative mismatch at the audit points.
    pub residual: f64,
}

impl Interpolant {
    /// Coefficients in the unscaled variable `t`, ascending.
    pub fn t_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().enumerate().map(|(k, &b)| b / self.radius.powi(k as i32)).collect()
    }

    pub fn eval_scaled(&self, u: f64) -> f64 {
        horner(&self.coeffs, u)
    }
}

pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Chebyshev nodes of the first kind on `[-1, 1]`, `count` of them.
pub fn chebyshev_nodes(count: usize) -> Vec<f64> {
    let m = count as f64;
    (0..count).map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / m).cos()).collect()
}

/// Interpolates `f` (a function of `t`) with a degree-`degree` polynomial on
/// `degree + 1` Chebyshev nodes scaled to `[-radius, radius]`, then audits the
/// interpolant at two off-node points.
pub fn interpolate(f: impl FnMut(f64) -> Result<f64>, degree: usize, radius: f64) -> Result<Interpolant> {
    interpolate_within(f, degree, radius, NOT_POLYNOMIAL_TOL)
}

/// [`interpolate`] with a caller-chosen audit tolerance, for functions known
/// to be only nearly polynomial.
pub fn interpolate_within(
    mut f: impl FnMut(f64) -> Result<f64>,
    degree: usize,
    radius: f64,
    tol: f64,
) -> Result<Interpolant> {
    let count = degree + 1;
    let nodes = chebyshev_nodes(count);
    let values = nodes.iter().map(|&u| f(radius * u)).collect::<Result<Vec<_>>>()?;
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

    // Chebyshev-series coefficients by the discrete cosine transform.
    let m = count as f64;
    let mut cheb = vec![0.0; count];
    for (k, ck) in cheb.iter_mut().enumerate() {
        let s: f64 = values
            .iter()
            .enumerate()
            .map(|(j, &v)| v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / m).cos())
            .sum();
        *ck = 2.0 * s / m;
    }
    cheb[0] *= 0.5;

    // Σ aₖ Tₖ(u) in the monomial basis.
    let mut coeffs = vec![0.0; count];
    let mut t_prev = vec![0.0; count];
    let mut t_curr = vec![0.0; count];
    t_curr[0] = 1.0;
    for (k, &a) in cheb.iter().enumerate() {
        if k == 1 {
            t_prev = std::mem::replace(&mut t_curr, vec![0.0; count]);
            t_curr[1] = 1.0;
        } else if k > 1 {
            let mut next = vec![0.0; count];
            for d in 0..count - 1 {
                next[d + 1] += 2.0 * t_curr[d];
            }
            for d in 0..count {
                next[d] -= t_prev[d];
            }
            t_prev = std::mem::replace(&mut t_curr, next);
        }
        for d in 0..count {
            coeffs[d] += a * t_curr[d];
        }
    }

    let mut interp = Interpolant { coeffs, radius, residual: 0.0 };
    let mut residual = 0.0f64;
    for &u in &AUDIT_POINTS {
        let exact = f(radius * u)?;
        let denom = scale.max(exact.abs()).max(f64::MIN_POSITIVE);
        residual = residual.max((exact - interp.eval_scaled(u)).abs() / denom);
    }
    interp.residual = residual;
    if !(residual <= tol) {
        return Err(Error::NotPolynomial(residual));
    }
    Ok(interp)
}

/// Roots of `Σ cₖ xᵏ` as `(re, im)` pairs via the eigenvalues of the balanced
/// companion matrix. The leading coefficient must be nonzero.
pub fn companion_roots(coeffs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    match degree {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![(-coeffs[0] / lead, 0.0)]),
        _ => {}
    }
    if let Some(roots) = schur_roots(coeffs) {
        return Ok(roots);
    }
    // The Francis iteration can stall when the roots come in ± pairs (an even
    // polynomial). Moving the origin breaks the symmetry.
    for shift in RETRY_SHIFTS {
        if let Some(roots) = schur_roots(&shift_variable(coeffs, shift)) {
            return Ok(roots.into_iter().map(|(re, im)| (re + shift, im)).collect());
        }
    }
    Err(Error::CompanionNoConvergence)
}

const RETRY_SHIFTS: [f64; 3] = [0.0625, -0.1875, 0.3125];

fn schur_roots(coeffs: &[f64]) -> Option<Vec<(f64, f64)>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let mut c = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        c[(i, degree - 1)] = -coeffs[i] / lead;
    }
    balance(&mut c);
    let schur = Schur::try_new(c, f64::EPSILON, 10_000)?;
    Some(schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect())
}

/// Ascending coefficients of `u ↦ q(u + s)`; its roots are those of `q` minus `s`.
fn shift_variable(q: &[f64], s: f64) -> Vec<f64> {
    let mut out = q.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            out[j] += s * out[j + 1];
        }
    }
    out
}

/// Parlett–Reinsch balancing with radix-2 scalings (exact in floating point).
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / radix;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Real roots extracted from a root list of a real polynomial.
#[derive(Clone, Debug)]
pub struct RealRoots {
    /// Real parts of the accepted roots, with multiplicity.
    pub roots: Vec<f64>,
    /// `max |Im| / (1 + |Re|)` over the accepted roots (after merging clusters).
    pub residual: f64,
}

/// Backward-error ceiling for replacing a cluster by its centroid.
const CLUSTER_BACKWARD_TOL: f64 = 1e-8;

/// Decides whether `roots` (of the polynomial with coefficients `coeffs`) are
/// real within `tol`.
///
/// A real root of multiplicity `m` is perturbed by rounding into a ring of
/// radius `~ε^{1/m}`, so raw imaginary parts overstate non-reality. When the
/// raw residual exceeds `tol`, nearby roots are merged into clusters of
/// growing radius; a merge is kept only if the polynomial rebuilt from the
/// real cluster centroids reproduces `coeffs` to `CLUSTER_BACKWARD_TOL`. A
/// genuinely complex pair never passes that backward check.
pub fn realify(roots: &[(f64, f64)], coeffs: &[f64], tol: f64) -> RealRoots {
    realify_mapped(roots, coeffs, tol, 0.0, 1.0)
}

/// [`realify`] for roots `u` of a polynomial in a scaled variable, with the
/// realness residual measured on `t = offset + scale·u`.
pub fn realify_mapped(roots: &[(f64, f64)], coeffs: &[f64], tol: f64, offset: f64, scale_t: f64) -> RealRoots {
    let realness = |zs: &[(f64, f64)]| {
        zs.iter().fold(0.0f64, |acc, &(re, im)| acc.max((scale_t * im).abs() / (1.0 + (offset + scale_t * re).abs())))
    };
    let lead = *coeffs.last().expect("nonempty coefficients");
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let scale = monic.iter().fold(1.0f64, |acc, c| acc.max(c.abs()));
    let raw = realness(roots);
    if raw <= tol {
        let real = roots.iter().map(|z| z.0).collect();
        return RealRoots { roots: snap(real, &monic, scale), residual: raw };
    }

    for exp in (-7..=-1).map(|e| 10f64.powi(e)) {
        let clusters = cluster(roots, exp);
        let centroids: Vec<((f64, f64), usize)> = clusters
            .iter()
            .map(|members| {
                let k = members.len() as f64;
                let re = members.iter().map(|&i| roots[i].0).sum::<f64>() / k;
                let im = members.iter().map(|&i| roots[i].1).sum::<f64>() / k;
                ((re, im), members.len())
            })
            .collect();
        let points: Vec<(f64, f64)> = centroids.iter().map(|&(z, _)| z).collect();
        let merged = realness(&points);
        if merged > tol {
            continue;
        }
        let real: Vec<f64> = centroids.iter().flat_map(|&((re, _), m)| std::iter::repeat_n(re, m)).collect();
        if backward_error(&real, &monic, scale) <= CLUSTER_BACKWARD_TOL {
            return RealRoots { roots: snap(real, &monic, scale), residual: merged };
        }
    }
    RealRoots { roots: roots.iter().map(|z| z.0).collect(), residual: raw }
}

/// Max coefficient mismatch between `Π(x − rᵢ)` and `monic`, relative to `scale`.
fn backward_error(real: &[f64], monic: &[f64], scale: f64) -> f64 {
    let rebuilt = monic_from_roots(real);
    rebuilt.iter().zip(monic).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs())) / scale
}

/// Backward-error ceiling for snapping nearby real roots together.
const SNAP_BACKWARD_TOL: f64 = 1e-13;

/// Coefficient noise splits a real root of multiplicity `m` into `m` real
/// roots `~δ^{1/m}` apart. Replaces clusters of real roots by their centroid
/// when the merged roots still reproduce `monic` to `SNAP_BACKWARD_TOL`,
/// trying ever larger cluster radii.
fn snap(real: Vec<f64>, monic: &[f64], scale: f64) -> Vec<f64> {
    let mut best = real;
    for exp in -10..=-5 {
        let points: Vec<(f64, f64)> = best.iter().map(|&r| (r, 0.0)).collect();
        let clusters = cluster(&points, 10f64.powi(exp));
        if clusters.len() == best.len() {
            continue;
        }
        let merged: Vec<f64> = clusters
            .iter()
            .flat_map(|members| {
                let c = members.iter().map(|&i| best[i]).sum::<f64>() / members.len() as f64;
                std::iter::repeat_n(c, members.len())
            })
            .collect();
        if backward_error(&merged, monic, scale) > SNAP_BACKWARD_TOL {
            break;
        }
        best = merged;
    }
    best
}

/// Single-linkage clusters under `|zᵢ − zⱼ| ≤ radius·(1 + max(|zᵢ|, |zⱼ|))`.
fn cluster(roots: &[(f64, f64)], radius: f64) -> Vec<Vec<usize>> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (roots[i], roots[j]);
            let dist = (a.0 - b.0).hypot(a.1 - b.1);
            let mag = a.0.hypot(a.1).max(b.0.hypot(b.1));
            if dist <= radius * (1.0 + mag) {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                if ri != rj {
                    label[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut label, i);
        if index_of[r] == usize::MAX {
            index_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index_of[r]].push(i);
    }
    groups
}

/// Ascending coefficients of `Π (x − rᵢ)`.
pub fn monic_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (d, &v) in c.iter().enumerate() {
            next[d + 1] += v;
            next[d] -= r * v;
        }
        c = next;
    }
    c
}
