//! Homogeneous polynomial operators on `S(n)`: the built-in catalog, symbolic
//! entry polynomials, and the constructors that produce new operators from
//! old ones (products, radial derivatives, orthogonal conjugation, linear
//! changes of variable).

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::analysis;
use crate::error::{Error, Result};
use crate::matrix::{entry_count, packed_position, skew_hermitian_part, sym_eigen, Square, SymMatrix};
use crate::poly::SparsePoly;
use crate::sampling::{random_spd_with, random_symmetric_with, rng_for};
use crate::univariate;

/// Seed for the sampled checks run while constructing operators.
const CONSTRUCTION_SEED: u64 = 0x6761_7264;

/// Orthogonality tolerance for conjugating matrices.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    Det,
    /// k-th elementary symmetric function of the eigenvalues.
    SigmaK(usize),
    /// Lagrangian Monge-Ampère operator on `S(2m)`, degree `2^m`.
    MaLag,
    /// `a₁₁a₂₂ − c·a₁₂²` on `S(2)`.
    QuadC(f64),
    /// `‖A‖²·det A` (Frobenius norm).
    Norm2Det,
}

#[derive(Clone, Debug)]
pub enum Kind {
    /// Polynomial in the packed upper-triangle entries `a_ij`, `i ≤ j`.
    Symbolic(SparsePoly),
    Builtin(Builtin),
    Product(Box<GardingOperator>, Box<GardingOperator>),
    RadialDerivative(Box<GardingOperator>),
    Conjugate {
        inner: Box<GardingOperator>,
        h: Square,
    },
    LinearTransform {
        inner: Box<GardingOperator>,
        map: LinearMap,
    },
}

/// Closure properties carried through the constructors. They are metadata;
/// every one of them can be re-checked numerically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub garding_dirichlet: bool,
    pub i_central: bool,
}

/// Outcome of a check recorded while building an operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Advisory {
    pub check: String,
    pub passed: bool,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct GardingOperator {
    n: usize,
    degree: usize,
    kind: Kind,
    name: String,
    flags: Flags,
    advisories: Vec<Advisory>,
}

impl GardingOperator {
    fn new(n: usize, degree: usize, kind: Kind, name: String, flags: Flags) -> Self {
        Self { n, degree, kind, name, flags, advisories: Vec::new() }
    }

    pub fn det(n: usize) -> Result<Self> {
        ensure_dim(n)?;
        let flags = Flags { garding_dirichlet: true, i_central: true };
        Ok(Self::new(n, n, Kind::Builtin(Builtin::Det), format!("det(n={n})"), flags))
    }

    pub fn sigma_k(n: usize, k: usize) -> Result<Self> {
        ensure_dim(n)?;
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("sigma_k needs 1 <= k <= n, got k={k}, n={n}")));
        }
        let flags = Flags { garding_dirichlet: true, i_central: true };
        Ok(Self::new(n, k, Kind::Builtin(Builtin::SigmaK(k)), format!("sigma_{k}(n={n})"), flags))
    }

    /// `n` is the real dimension `2m`; the degree is `2^m`.
    pub fn ma_lag(n: usize) -> Result<Self> {
        ensure_dim(n)?;
        if !n.is_multiple_of(2) {
            return Err(Error::OddDimension(n));
        }
        let m = n / 2;
        if m > 16 {
            return Err(Error::InvalidArgument(format!("ma_lag degree 2^{m} is out of range")));
        }
        let flags = Flags { garding_dirichlet: true, i_central: true };
        Ok(Self::new(n, 1 << m, Kind::Builtin(Builtin::MaLag), format!("ma_lag(n={n})"), flags))
    }

    pub fn quad_c(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!("quad_c needs a finite c, got {c}")));
        }
        // hyperbolic for c ≥ 0, positive on P for c ≤ 1; D_I = I for every c
        let flags = Flags { garding_dirichlet: (0.0..=1.0).contains(&c), i_central: true };
        Ok(Self::new(2, 2, Kind::Builtin(Builtin::QuadC(c)), format!("quad_c(c={c})"), flags))
    }

    /// Not hyperbolic, but O(n)-invariant with nonnegative diagonal coefficients.
    pub fn norm2_det(n: usize) -> Result<Self> {
        ensure_dim(n)?;
        let flags = Flags { garding_dirichlet: false, i_central: true };
        Ok(Self::new(n, n + 2, Kind::Builtin(Builtin::Norm2Det), format!("norm2_det(n={n})"), flags))
    }

    /// Operator given by a homogeneous polynomial in the `n(n+1)/2` packed
    /// upper-triangle entries. Off-diagonal variables stand for `a_ij` itself.
    pub fn symbolic(n: usize, poly: SparsePoly) -> Result<Self> {
        ensure_dim(n)?;
        if poly.nvars() != entry_count(n) {
            return Err(Error::DimensionMismatch { expected: entry_count(n), found: poly.nvars() });
        }
        let (lo, hi) = poly.degree_range();
        if poly.is_zero() || hi == 0 {
            return Err(Error::InvalidArgument("symbolic operator must have degree >= 1".into()));
        }
        if lo != hi {
            return Err(Error::NotHomogeneous { min: lo, max: hi });
        }
        Ok(Self::new(n, hi, Kind::Symbolic(poly), format!("symbolic(n={n}, N={hi})"), Flags::default()))
    }

    pub fn product(a: GardingOperator, b: GardingOperator) -> Result<Self> {
        if a.n != b.n {
            return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
        }
        let flags = Flags {
            garding_dirichlet: a.flags.garding_dirichlet && b.flags.garding_dirichlet,
            i_central: a.flags.i_central && b.flags.i_central,
        };
        let name = format!("product({}, {})", a.name, b.name);
        Ok(Self::new(a.n, a.degree + b.degree, Kind::Product(Box::new(a), Box::new(b)), name, flags))
    }

    /// `g′(A) = d/dt g(tI + A)` at `t = 0`.
    pub fn radial_derivative(g: GardingOperator) -> Result<Self> {
        if g.degree < 2 {
            return Err(Error::DegreeTooLow(g.degree));
        }
        let flags = Flags {
            garding_dirichlet: g.flags.garding_dirichlet,
            i_central: g.flags.garding_dirichlet && g.flags.i_central,
        };
        let name = format!("radial_derivative({})", g.name);
        Ok(Self::new(g.n, g.degree - 1, Kind::RadialDerivative(Box::new(g)), name, flags))
    }

    /// `g_h(A) = g(h·A·hᵗ)` for orthogonal `h`.
    pub fn conjugate(g: GardingOperator, h: Square) -> Result<Self> {
        if h.n() != g.n {
            return Err(Error::DimensionMismatch { expected: g.n, found: h.n() });
        }
        let defect = h.orthogonality_defect();
        if !(defect <= ORTHOGONALITY_TOL) {
            return Err(Error::NotOrthogonal(defect));
        }
        let name = format!("conjugate({})", g.name);
        let flags = g.flags;
        let mut op = Self::new(g.n, g.degree, Kind::Conjugate { inner: Box::new(g), h }, name, flags);
        op.advisories.push(Advisory { check: "orthogonality_defect".into(), passed: true, value: defect, note: None });
        Ok(op)
    }

    /// `g_L(A) = g(L(A))`. Records three advisory checks: `L(P)` inside the
    /// closed cone of `g` (sampled), `L(I) = kI` with `k > 0`, and trace-free
    /// preservation on a trace-free basis.
    pub fn linear_transform(g: GardingOperator, map: LinearMap) -> Result<Self> {
        if map.n() != g.n {
            return Err(Error::DimensionMismatch { expected: g.n, found: map.n() });
        }
        let n = g.n;
        let positivity = positivity_advisory(&g, &map);
        let (identity_ok, identity_adv) = identity_advisory(&map);
        let trace_adv = trace_free_advisory(&map);
        let flags = Flags {
            garding_dirichlet: g.flags.garding_dirichlet && positivity.passed,
            i_central: g.flags.garding_dirichlet && g.flags.i_central && identity_ok && trace_adv.passed,
        };
        let name = format!("linear_transform({})", g.name);
        let mut op = Self::new(n, g.degree, Kind::LinearTransform { inner: Box::new(g), map }, name, flags);
        op.advisories.extend([positivity, identity_adv, trace_adv]);
        Ok(op)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Homogeneity degree `N`.
    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn advisories(&self) -> &[Advisory] {
        &self.advisories
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub(crate) fn push_advisory(&mut self, adv: Advisory) {
        self.advisories.push(adv);
    }

    pub fn evaluate(&self, a: &SymMatrix) -> Result<f64> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.n() });
        }
        match &self.kind {
            Kind::Symbolic(p) => p.eval(a.entries()),
            Kind::Builtin(b) => eval_builtin(b, a),
            Kind::Product(x, y) => Ok(x.evaluate(a)? * y.evaluate(a)?),
            Kind::RadialDerivative(g) => radial_derivative_at(g, a),
            Kind::Conjugate { inner, h } => inner.evaluate(&a.congruence(h)),
            Kind::LinearTransform { inner, map } => inner.evaluate(&map.apply(a)),
        }
    }

    /// `ln g(A)`, evaluated at `A/‖A‖` and rescaled by homogeneity so that
    /// high-degree operators do not overflow.
    pub fn log_evaluate(&self, a: &SymMatrix) -> Result<f64> {
        let s = a.frobenius_norm();
        if s == 0.0 {
            return Err(Error::Domain(format!("{} vanishes at the zero matrix", self.name)));
        }
        let v = self.evaluate(&a.scale(1.0 / s))?;
        if !(v > 0.0) {
            return Err(Error::Domain(format!("{}(A) = {v:e} is not positive", self.name)));
        }
        Ok(v.ln() + self.degree as f64 * s.ln())
    }

    /// Max over `samples` random `(A, c)`, `c ∈ [0.5, 2]`, of
    /// `|g(cA) − cᴺg(A)| / ((1 + |g(A)|)·cᴺ)`.
    pub fn homogeneity_defect(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..samples {
            let mut rng = rng_for(seed, i as u64);
            let a = random_symmetric_with::<f64, _>(self.n, &mut rng);
            let c: f64 = rng.gen_range(0.5..=2.0);
            let cn = c.powi(self.degree as i32);
            let ga = self.evaluate(&a)?;
            let gca = self.evaluate(&a.scale(c))?;
            worst = worst.max((gca - cn * ga).abs() / ((1.0 + ga.abs()) * cn));
        }
        Ok(worst)
    }
}

impl fmt::Display for GardingOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [n={}, N={}]", self.name, self.n, self.degree)
    }
}

fn ensure_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::EmptyDimension)
    } else {
        Ok(())
    }
}

/// `e_k` of `values` by the usual one-pass recurrence.
pub fn elementary_symmetric(values: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &v in values {
        for j in (1..=k).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e[k]
}

fn eval_builtin(b: &Builtin, a: &SymMatrix) -> Result<f64> {
    match *b {
        Builtin::Det => Ok(sym_eigen(a)?.eigenvalues.iter().product()),
        Builtin::SigmaK(k) => Ok(elementary_symmetric(&sym_eigen(a)?.eigenvalues, k)),
        Builtin::MaLag => {
            let (_, mu) = skew_hermitian_part(a)?;
            Ok(ma_lag_from_parts(0.5 * a.trace(), &mu))
        }
        Builtin::QuadC(c) => Ok(a.get(0, 0) * a.get(1, 1) - c * a.get(0, 1) * a.get(0, 1)),
        Builtin::Norm2Det => {
            let det: f64 = sym_eigen(a)?.eigenvalues.iter().product();
            Ok(a.dot(a) * det)
        }
    }
}

/// `Π (half_trace ± μ₁ ± ⋯ ± μₘ)` over all sign patterns, built by doubling
/// the list of partial sums one `μⱼ` at a time.
fn ma_lag_from_parts(half_trace: f64, mu: &[f64]) -> f64 {
    ma_lag_factors(half_trace, mu).iter().product()
}

fn ma_lag_factors(half_trace: f64, mu: &[f64]) -> Vec<f64> {
    let mut sums = vec![half_trace];
    for &m in mu {
        sums = sums.iter().flat_map(|&s| [s + m, s - m]).collect();
    }
    sums
}

/// `t¹` coefficient of `t ↦ g(tI + A)`, interpolated on `[−‖A‖, ‖A‖]` so
/// that the rounding error scales like `‖A‖^{N−1}`, as the value does.
/// `ma_lag` has a closed form.
fn radial_derivative_at(g: &GardingOperator, a: &SymMatrix) -> Result<f64> {
    if let Kind::Builtin(Builtin::MaLag) = g.kind {
        // each factor gains m·t under A ↦ A + tI, so the derivative is the
        // (N−1)-th elementary symmetric function of the factors, times m
        let (_, mu) = skew_hermitian_part(a)?;
        let factors = ma_lag_factors(0.5 * a.trace(), &mu);
        return Ok(mu.len() as f64 * elementary_symmetric(&factors, g.degree - 1));
    }
    let radius = a.frobenius_norm();
    if radius == 0.0 {
        return Ok(0.0);
    }
    let interp = univariate::interpolate(|t| g.evaluate(&a.shift(t)), g.degree, radius)?;
    Ok(interp.coeffs[1] / radius)
}

fn positivity_advisory(g: &GardingOperator, map: &LinearMap) -> Advisory {
    const SAMPLES: usize = 200;
    const TOL: f64 = 1e-9;
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for i in 0..=SAMPLES {
        let p = if i == 0 {
            SymMatrix::identity(g.n)
        } else {
            let mut rng = rng_for(CONSTRUCTION_SEED, i as u64);
            random_spd_with::<f64, _>(g.n, 2.0, &mut rng)
        };
        let lp = map.apply(&p);
        match analysis::garding_eigenvalues(g, &SymMatrix::identity(g.n), &lp) {
            Ok(eig) => {
                let lo = eig.min() / (1.0 + lp.frobenius_norm());
                worst = worst.min(lo);
                // L(I) must sit strictly inside the cone for g_L to be I-hyperbolic
                if lo < -TOL || (i == 0 && lo <= TOL) {
                    ok = false;
                }
            }
            Err(_) => {
                ok = false;
                worst = f64::NAN;
                break;
            }
        }
    }
    Advisory {
        check: "L(P) in closure of cone".into(),
        passed: ok,
        value: worst,
        note: Some("sampled, not proven".into()),
    }
}

fn identity_advisory(map: &LinearMap) -> (bool, Advisory) {
    let n = map.n();
    let li = map.apply(&SymMatrix::identity(n));
    let k = li.trace() / n as f64;
    let defect = li.sub(&SymMatrix::scalar(n, k)).frobenius_norm();
    let ok = k > 0.0 && defect <= 1e-10 * li.frobenius_norm().max(1e-300);
    (ok, Advisory { check: "L(I) = kI, k > 0".into(), passed: ok, value: k, note: None })
}

fn trace_free_advisory(map: &LinearMap) -> Advisory {
    let n = map.n();
    let norm = map.frobenius_norm();
    let mut worst = 0.0f64;
    for e in trace_free_basis(n) {
        let rel = map.apply(&e).trace().abs() / (norm * e.frobenius_norm()).max(1e-300);
        worst = worst.max(rel);
    }
    Advisory { check: "tr A = 0 implies tr L(A) = 0".into(), passed: worst <= 1e-10, value: worst, note: None }
}

/// `e_ii − e_{i+1,i+1}` for `i < n−1`, then the symmetric off-diagonal units.
pub fn trace_free_basis(n: usize) -> Vec<SymMatrix> {
    let mut basis = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut e = SymMatrix::zeros(n);
        e.set(i, i, 1.0);
        e.set(i + 1, i + 1, -1.0);
        basis.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = SymMatrix::zeros(n);
            e.set(i, j, 1.0);
            basis.push(e);
        }
    }
    basis
}

/// Linear endomorphism of `S(n)`, stored as its action on packed entry vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    n: usize,
    /// Row-major `d × d`, `d = n(n+1)/2`; column `k` is `L(E_k)` for the
    /// symmetric unit `E_k` at packed position `k`.
    action: Vec<f64>,
}

impl LinearMap {
    pub fn identity(n: usize) -> Self {
        let d = entry_count(n);
        let mut action = vec![0.0; d * d];
        for k in 0..d {
            action[k * d + k] = 1.0;
        }
        Self { n, action }
    }

    pub fn from_action(n: usize, rows: &[Vec<f64>]) -> Result<Self> {
        ensure_dim(n)?;
        let d = entry_count(n);
        if rows.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rows.len() });
        }
        let mut action = Vec::with_capacity(d * d);
        for r in rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: r.len() });
            }
            action.extend_from_slice(r);
        }
        Ok(Self { n, action })
    }

    /// Tabulates a linear function of `A` on the symmetric units.
    pub fn from_fn(n: usize, f: impl Fn(&SymMatrix) -> SymMatrix) -> Self {
        let d = entry_count(n);
        let mut action = vec![0.0; d * d];
        for k in 0..d {
            let (i, j) = packed_position(n, k);
            let mut e = SymMatrix::zeros(n);
            e.set(i, j, 1.0);
            let image = f(&e);
            for (r, &v) in image.entries().iter().enumerate() {
                action[r * d + k] = v;
            }
        }
        Self { n, action }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn action_rows(&self) -> Vec<Vec<f64>> {
        self.action.chunks(entry_count(self.n)).map(<[f64]>::to_vec).collect()
    }

    pub fn apply(&self, a: &SymMatrix) -> SymMatrix {
        let d = entry_count(self.n);
        let x = a.entries();
        let out = (0..d).map(|r| (0..d).map(|k| self.action[r * d + k] * x[k]).sum()).collect();
        SymMatrix::from_entries(self.n, out).expect("action preserves the entry count")
    }

    /// Adjoint for the trace inner product: `⟨L(A), B⟩ = ⟨A, Lᵗ(B)⟩`.
    pub fn adjoint(&self) -> Self {
        let d = entry_count(self.n);
        let weight = |k: usize| {
            let (i, j) = packed_position(self.n, k);
            if i == j {
                1.0
            } else {
                2.0
            }
        };
        let mut action = vec![0.0; d * d];
        for r in 0..d {
            for k in 0..d {
                action[r * d + k] = self.action[k * d + r] * weight(k) / weight(r);
            }
        }
        Self { n: self.n, action }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.action.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
