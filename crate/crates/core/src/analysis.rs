//! Gårding eigenvalues, cones, gradients and the centrality tests.
//!
//! The eigenvalues of `A` in direction `B` are read off the factorization
//! `g(tB + A) = g(B)·Π(t + λⱼ)`: the profile `t ↦ g(tB + A)` is interpolated
//! at Chebyshev nodes and its roots come from a balanced companion matrix.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{entry_count, packed_position, sym_eigen, SymMatrix};
use crate::operator::{trace_free_basis, GardingOperator, Kind, LinearMap};
use crate::report::{CheckReport, Witness};
use crate::sampling::{
    random_orthogonal_with, random_spd_with, random_symmetric_with, random_trace_free_with, rng_for,
};
use crate::univariate::{self, companion_roots, realify_mapped};

/// Max `|Im|/(1+|Re|)` over the profile roots for a spectrum to count as real.
pub const HYPERBOLICITY_TOL: f64 = 1e-6;
/// Strict-interior margin for cone membership.
pub const CONE_MARGIN: f64 = 1e-9;
/// Relative agreement required between the profile's leading coefficient and `g(B)`.
pub const LEADING_COEFF_TOL: f64 = 1e-8;
/// Relative size below which `g(B)` counts as zero (against `‖B‖ᴺ`).
const DEGENERATE_TOL: f64 = 1e-12;

const CENTRAL_GRADIENT_TOL: f64 = 1e-7;
const CENTRAL_LAPLACIAN_TOL: f64 = 1e-6;
const CENTRAL_SAMPLES: usize = 20;
const INTERLACE_SLACK: f64 = 1e-8;
const LEMMA22_TOL: f64 = 1e-6;

/// Gårding eigenvalues, nonincreasing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenList {
    pub values: Vec<f64>,
    pub realness_residual: f64,
}

impl EigenList {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Profile of `t ↦ g(tB + A)`: ascending coefficients in `t` together with the
/// interpolant they came from, which is expanded about `center` (the mean
/// root) in the variable `u = (t − center)/radius`.
#[derive(Clone, Debug)]
pub struct Profile {
    pub coeffs: Vec<f64>,
    pub g_of_b: f64,
    pub center: f64,
    pub interpolant: univariate::Interpolant,
}

fn check_dims(g: &GardingOperator, a: &SymMatrix) -> Result<()> {
    if a.n() == g.n() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: g.n(), found: a.n() })
    }
}

fn spectral_norm(b: &SymMatrix) -> Result<f64> {
    let eig = sym_eigen(b)?;
    Ok(eig.max_eigenvalue().abs().max(eig.min_eigenvalue().abs()))
}

/// Coefficients of `q(t − c)` from those of `q`, ascending.
fn taylor_shift(q: &[f64], c: f64) -> Vec<f64> {
    let mut out = q.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            out[j] -= c * out[j + 1];
        }
    }
    out
}

/// Interpolates the profile twice. The first pass, on `[−R₀, R₀]` with
/// `R₀ = 2(1 + ‖A‖/‖B‖₂)`, yields the mean `c` and variance `σ²` of the
/// roots from the top three coefficients. The second pass is centred at `c`
/// with radius `1.25·σ·√(N−1)` (which covers every real root), floored at
/// `‖A + cB‖/(4‖B‖₂)`. A third pass shrinks that to 1.15 times the extent of
/// the roots it yields (at most tenfold), when smaller. Sampling far beyond a root cluster would bury the
/// values near the roots under the rounding noise of the large ones.
pub fn profile(g: &GardingOperator, b: &SymMatrix, a: &SymMatrix) -> Result<Profile> {
    check_dims(g, a)?;
    check_dims(g, b)?;
    let big_n = g.degree();
    let nf = big_n as f64;
    let g_of_b = g.evaluate(b)?;
    let b_scale = spectral_norm(b)?;
    if !g_of_b.is_finite() || g_of_b.abs() <= DEGENERATE_TOL * b.frobenius_norm().powi(big_n as i32) {
        return Err(Error::DegenerateDirection(g_of_b));
    }
    let first_radius = 2.0 * (1.0 + a.frobenius_norm() / b_scale);
    let first = univariate::interpolate(|t| g.evaluate(&a.add_scaled(t, b)), big_n, first_radius)?.t_coeffs();
    let e1 = first[big_n - 1] / first[big_n];
    let e2 = if big_n >= 2 { first[big_n - 2] / first[big_n] } else { 0.0 };
    let variance = ((e1 * e1 - 2.0 * e2) / nf - (e1 / nf).powi(2)).abs();
    let center = if e1.is_finite() { -e1 / nf } else { 0.0 };

    let shifted = a.add_scaled(center, b);
    let radius =
        [1.25 * (variance * (nf - 1.0)).sqrt(), 0.25 * shifted.frobenius_norm() / b_scale, 1e-8 * (1.0 + center.abs())]
            .into_iter()
            .filter(|r| r.is_finite())
            .fold(0.0f64, f64::max);
    let mut interpolant = univariate::interpolate(|s| g.evaluate(&shifted.add_scaled(s, b)), big_n, radius)?;
    // The variance bound is loose unless one root sits far out. A window fitted
    // to the roots just found conditions the interior ones far better.
    let extent = companion_roots(&interpolant.coeffs)?.iter().fold(0.0f64, |m, z| m.max(z.0.hypot(z.1)));
    if 1.15 * extent < 0.8 {
        let tighter = 1.15 * extent.max(0.1) * radius;
        if let Ok(fit) = univariate::interpolate(|s| g.evaluate(&shifted.add_scaled(s, b)), big_n, tighter) {
            interpolant = fit;
        }
    }
    let coeffs = taylor_shift(&interpolant.t_coeffs(), center);
    let lead = coeffs[big_n];
    let defect = (lead - g_of_b).abs() / g_of_b.abs();
    if !(defect <= LEADING_COEFF_TOL) {
        return Err(Error::NotPolynomial(defect));
    }
    Ok(Profile { coeffs, g_of_b, center, interpolant })
}

/// Ascending coefficients of `t ↦ g(tB + A)`, `N + 1` of them.
pub fn univariate_profile(g: &GardingOperator, b: &SymMatrix, a: &SymMatrix) -> Result<Vec<f64>> {
    Ok(profile(g, b, a)?.coeffs)
}

/// The `N` reals `λⱼ` with `g(tB + A) = g(B)·Π(t + λⱼ)`.
///
/// Roots are found for the centred, scaled profile, where the companion
/// matrix is well balanced, and mapped back to `t`.
pub fn garding_eigenvalues(g: &GardingOperator, b: &SymMatrix, a: &SymMatrix) -> Result<EigenList> {
    let prof = profile(g, b, a)?;
    let interp = &prof.interpolant;
    let radius = interp.radius;
    let roots = companion_roots(&interp.coeffs)?;
    let t_complex: Vec<(f64, f64)> = roots.iter().map(|&(re, im)| (prof.center + radius * re, radius * im)).collect();
    // Clustered roots are refined by zooming in; when that fails the global
    // roots go through the centroid merging in `realify_mapped`.
    let zoomed = zoom_clusters(g, b, a, &t_complex).ok().flatten();
    let (t_roots, residual) = match zoomed {
        Some((t_roots, residual)) if residual <= HYPERBOLICITY_TOL => (t_roots, residual),
        _ => {
            let real = realify_mapped(&roots, &interp.coeffs, HYPERBOLICITY_TOL, prof.center, radius);
            if !(real.residual <= HYPERBOLICITY_TOL) {
                return Err(Error::NonRealSpectrum(real.residual));
            }
            (real.roots.iter().map(|u| prof.center + u * radius).collect(), real.residual)
        }
    };
    let mut values: Vec<f64> = t_roots.iter().map(|t| -t).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(EigenList { values, realness_residual: residual })
}

fn realness(t: (f64, f64)) -> f64 {
    t.1.abs() / (1.0 + t.0.abs())
}

/// Most zoom levels spent on one root group.
const ZOOM_DEPTH: usize = 12;
/// Most refinement sweeps over all groups.
const ZOOM_SWEEPS: usize = 8;
/// Audit tolerance for a deflated window. The divided-out factors are only
/// estimates until the sweeps settle.
const ZOOM_AUDIT_TOL: f64 = 1e-3;

/// Second look at root clusters that coefficient noise has blurred. Roots are
/// grouped by gaps below 5% of their range (plus the imaginary noise), and
/// every group of two or more is re-interpolated on a window around it after
/// dividing `g` by the other groups' factors (see [`zoom_group`]). An outside
/// group enters through its roots when they are real and through
/// `(t − c)^k` at its centroid `c` otherwise: centroids are well conditioned
/// even when the roots are not, and the error is second order in the spread.
/// Sweeps repeat, block Gauss–Seidel style, until the roots settle.
///
/// Returns roots in `t` and the worst realness, or `None` when nothing is
/// clustered; errors when a group stays non-real.
fn zoom_clusters(
    g: &GardingOperator,
    b: &SymMatrix,
    a: &SymMatrix,
    roots: &[(f64, f64)],
) -> Result<Option<(Vec<f64>, f64)>> {
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&i, &j| roots[i].0.total_cmp(&roots[j].0));
    let lo = roots.iter().map(|z| z.0).fold(f64::INFINITY, f64::min);
    let hi = roots.iter().map(|z| z.0).fold(f64::NEG_INFINITY, f64::max);
    let max_im = roots.iter().fold(0.0f64, |m, z| m.max(z.1.abs()));
    let link = 0.05 * (hi - lo) + 3.0 * max_im;
    let mut groups: Vec<Vec<(f64, f64)>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(grp) if roots[i].0 - grp.last().expect("nonempty group").0 <= link => grp.push(roots[i]),
            _ => groups.push(vec![roots[i]]),
        }
    }
    if groups.iter().all(|grp| grp.len() == 1) {
        return Ok(None);
    }

    let represent = |grp: &[(f64, f64)]| -> Vec<(f64, i32)> {
        if grp.iter().all(|&z| realness(z) <= HYPERBOLICITY_TOL) {
            grp.iter().map(|z| (z.0, 1)).collect()
        } else {
            vec![(grp.iter().map(|z| z.0).sum::<f64>() / grp.len() as f64, grp.len() as i32)]
        }
    };
    let scale = 1.0 + lo.abs().max(hi.abs());
    let mut residuals: Vec<f64> =
        groups.iter().map(|grp| grp.iter().fold(0.0f64, |m, &z| m.max(realness(z)))).collect();
    for sweep in 0..ZOOM_SWEEPS {
        let mut moved = 0.0f64;
        for gi in 0..groups.len() {
            if groups[gi].len() == 1 {
                continue;
            }
            let others: Vec<(f64, i32)> =
                groups.iter().enumerate().filter(|&(j, _)| j != gi).flat_map(|(_, grp)| represent(grp)).collect();
            match zoom_group(g, b, a, &groups[gi], &others) {
                Ok((mut fixed, residual)) => {
                    fixed.sort_by(f64::total_cmp);
                    let mut old: Vec<f64> = groups[gi].iter().map(|z| z.0).collect();
                    old.sort_by(f64::total_cmp);
                    moved = old.iter().zip(&fixed).fold(moved, |m, (x, y)| m.max((x - y).abs()));
                    groups[gi] = fixed.into_iter().map(|t| (t, 0.0)).collect();
                    residuals[gi] = residual;
                }
                Err(err) if sweep + 1 == ZOOM_SWEEPS => return Err(err),
                Err(_) => moved = f64::INFINITY,
            }
        }
        if moved <= 1e-13 * scale {
            break;
        }
    }
    let worst = residuals.iter().fold(0.0f64, |m, &r| m.max(r));
    if !(worst <= HYPERBOLICITY_TOL) {
        return Err(Error::NonRealSpectrum(worst));
    }
    Ok(Some((groups.into_iter().flatten().map(|z| z.0).collect(), worst)))
}

/// Refines one group of roots. `others` lists `(root, multiplicity)` factors
/// to divide out. While the roots found fill less than half the window, the
/// window is shrunk around them and the group re-interpolated; the last real
/// set of roots is kept.
fn zoom_group(
    g: &GardingOperator,
    b: &SymMatrix,
    a: &SymMatrix,
    members: &[(f64, f64)],
    others: &[(f64, i32)],
) -> Result<(Vec<f64>, f64)> {
    let k = members.len();
    let mut current = members.to_vec();
    let mut best = None;
    for _ in 0..ZOOM_DEPTH {
        let center = current.iter().map(|z| z.0).sum::<f64>() / k as f64;
        let spread = current.iter().fold(0.0f64, |m, z| m.max((z.0 - center).hypot(z.1)));
        let window = (1.25 * spread).max(1e-12 * (1.0 + center.abs()));
        let nearest = others.iter().fold(f64::INFINITY, |m, &(c, _)| m.min((c - center).abs()));
        if nearest < 1.1 * window {
            return Err(Error::NonRealSpectrum(f64::NAN));
        }
        let deflated = |s: f64| -> Result<f64> {
            let t = center + s;
            let far: f64 = others.iter().map(|&(c, m)| (t - c).powi(m)).product();
            Ok(g.evaluate(&a.add_scaled(t, b))? / far)
        };
        let local = univariate::interpolate_within(deflated, k, window, ZOOM_AUDIT_TOL)?;
        let local_roots = companion_roots(&local.coeffs)?;
        // judged in window units, so an exactly repeated root (which the
        // companion matrix splits by ~ε^{1/k} of the window) is merged
        let fixed = realify_mapped(&local_roots, &local.coeffs, HYPERBOLICITY_TOL, 0.0, 1.0);
        let next: Vec<(f64, f64)> = local_roots.iter().map(|&(re, im)| (center + window * re, window * im)).collect();
        let next_center = next.iter().map(|z| z.0).sum::<f64>() / k as f64;
        let next_spread = next.iter().fold(0.0f64, |m, z| m.max((z.0 - next_center).hypot(z.1)));
        if fixed.residual <= HYPERBOLICITY_TOL {
            let roots = fixed.roots.iter().map(|u| center + window * u).collect();
            best = Some((roots, fixed.residual * window / (1.0 + center.abs())));
        }
        // roots filling a small part of the window are still poorly resolved
        if !(next_spread < 0.5 * spread) {
            break;
        }
        current = next;
    }
    best.ok_or(Error::NonRealSpectrum(f64::NAN))
}

/// `I`-eigenvalues.
pub fn i_eigenvalues(g: &GardingOperator, a: &SymMatrix) -> Result<EigenList> {
    garding_eigenvalues(g, &SymMatrix::identity(g.n()), a)
}

pub fn check_hyperbolic(g: &GardingOperator, b: &SymMatrix, samples: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("hyperbolic");
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for i in 0..samples {
        let mut rng = rng_for(seed, i as u64);
        let a = random_symmetric_with::<f64, _>(g.n(), &mut rng);
        match garding_eigenvalues(g, b, &a) {
            Ok(eig) => worst = worst.max(eig.realness_residual),
            Err(err) => {
                failures += 1;
                if let Error::NonRealSpectrum(r) = err {
                    worst = worst.max(r);
                }
                if report.pass {
                    report.note(format!("first failure at sample {i}: {err}"));
                }
                report.fail("realness_residual", Some(Witness::from(&a)));
                if matches!(err, Error::DegenerateDirection(_)) {
                    break;
                }
            }
        }
    }
    report
        .margin("max_realness_residual", worst)
        .margin("tolerance", HYPERBOLICITY_TOL)
        .count("samples", samples)
        .count("failures", failures);
    report
}

/// Membership of `A` in the open Gårding cone of `g` (direction `I`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeCertificate {
    pub member: bool,
    /// Smallest `I`-eigenvalue.
    pub margin: f64,
    pub g_value: f64,
}

pub fn in_garding_cone(g: &GardingOperator, a: &SymMatrix) -> Result<ConeCertificate> {
    let eig = i_eigenvalues(g, a)?;
    let g_value = g.evaluate(a)?;
    let margin = eig.min();
    Ok(ConeCertificate { member: margin > CONE_MARGIN && g_value > 0.0, margin, g_value })
}

/// Spread used for SPD sample `i`: cycles through 1, 2, 3.
pub(crate) fn spread_for(i: usize) -> f64 {
    1.0 + (i % 3) as f64
}

/// Every sampled positive definite matrix (the identity first) must lie in the cone.
pub fn check_dirichlet(g: &GardingOperator, samples: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("dirichlet");
    let mut worst = f64::INFINITY;
    let mut failures = 0usize;
    for i in 0..samples {
        let a = if i == 0 {
            SymMatrix::identity(g.n())
        } else {
            random_spd_with::<f64, _>(g.n(), spread_for(i), &mut rng_for(seed, i as u64))
        };
        let outcome = in_garding_cone(g, &a);
        let ok = match &outcome {
            Ok(cert) => {
                worst = worst.min(cert.margin / a.frobenius_norm());
                cert.member
            }
            Err(_) => false,
        };
        if !ok {
            failures += 1;
            if report.pass {
                let why = match outcome {
                    Ok(cert) => {
                        format!("sample {i} outside the cone: margin {:e}, g = {:e}", cert.margin, cert.g_value)
                    }
                    Err(err) => format!("sample {i}: {err}"),
                };
                report.note(why);
            }
            report.fail("cone_margin", Some(Witness::from(&a)));
            if i == 0 {
                break;
            }
        }
    }
    report
        .margin("min_relative_cone_margin", if worst.is_finite() { worst } else { f64::NAN })
        .count("samples", samples)
        .count("failures", failures);
    report
}

/// Gradient of `g` at `A` as a symmetric matrix, so that `⟨∇g(A), X⟩` is the
/// directional derivative along symmetric `X`. Symbolic operators are
/// differentiated exactly; everything else uses Richardson-extrapolated
/// central differences with base step `1e−5·(1 + ‖A‖)`.
pub fn gradient(g: &GardingOperator, a: &SymMatrix) -> Result<SymMatrix> {
    check_dims(g, a)?;
    let n = g.n();
    let d = entry_count(n);
    let mut out = SymMatrix::zeros(n);
    if let Kind::Symbolic(p) = g.kind() {
        for k in 0..d {
            let (i, j) = packed_position(n, k);
            let partial = p.partial(k).eval(a.entries())?;
            out.set(i, j, if i == j { partial } else { 0.5 * partial });
        }
        return Ok(out);
    }
    let h = 1e-5 * (1.0 + a.frobenius_norm());
    for k in 0..d {
        let (i, j) = packed_position(n, k);
        let mut e = SymMatrix::zeros(n);
        e.set(i, j, 1.0);
        let central = |step: f64| -> Result<f64> {
            Ok((g.evaluate(&a.add_scaled(step, &e))? - g.evaluate(&a.add_scaled(-step, &e))?) / (2.0 * step))
        };
        let coarse = central(h)?;
        let fine = central(0.5 * h)?;
        let derivative = (4.0 * fine - coarse) / 3.0;
        out.set(i, j, if i == j { derivative } else { 0.5 * derivative });
    }
    Ok(out)
}

/// Sum of the `I`-eigenvalues.
pub fn garding_laplacian(g: &GardingOperator, a: &SymMatrix) -> Result<f64> {
    Ok(i_eigenvalues(g, a)?.sum())
}

/// The same sum read off the profile: the ratio of its two top coefficients.
pub fn laplacian_from_profile(g: &GardingOperator, a: &SymMatrix) -> Result<f64> {
    let c = univariate_profile(g, &SymMatrix::identity(g.n()), a)?;
    let big_n = g.degree();
    Ok(c[big_n - 1] / c[big_n])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralityResult {
    /// Gradient form: `∇g(I) = kI` with `k > 0`.
    pub central: bool,
    pub k: f64,
    #[serde(skip)]
    pub gradient_at_i: SymMatrix,
    /// Max off-diagonal `|∇g(I)ᵢⱼ|`, relative to `|k|`.
    pub offdiag_residual: f64,
    /// Max diagonal deviation from `k`, relative to `|k|`.
    pub diag_residual: f64,
    /// `|N·g(I) − k·n| / (N·|g(I)|)`.
    pub euler_defect: f64,
    /// Laplacian form: `Δ(A₀) = 0` on trace-free `A₀` and `Δ(A)/tr A` constant.
    /// `None` when the Laplacian could not be computed (non-real spectrum).
    pub laplacian_central: Option<bool>,
    /// Max `|Δ(A₀)| / (‖A₀‖·N)` over trace-free samples.
    pub laplacian_tracefree_max: f64,
    /// `(max − min)/|mean|` of `Δ(A)/tr A` over positive definite samples.
    pub laplacian_ratio_spread: f64,
    pub laplacian_ratio_mean: f64,
}

impl CentralityResult {
    /// Whether the gradient and Laplacian forms disagree.
    pub fn forms_disagree(&self) -> bool {
        matches!(self.laplacian_central, Some(l) if l != self.central)
    }

    pub fn to_report(&self) -> CheckReport {
        let mut report = CheckReport::new("central");
        report
            .margin("k", self.k)
            .margin("offdiag_residual", self.offdiag_residual)
            .margin("diag_residual", self.diag_residual)
            .margin("euler_defect", self.euler_defect)
            .margin("laplacian_tracefree_max", self.laplacian_tracefree_max)
            .margin("laplacian_ratio_spread", self.laplacian_ratio_spread)
            .margin("laplacian_ratio_mean", self.laplacian_ratio_mean);
        match self.laplacian_central {
            None => {
                report.note("Laplacian form not evaluated: spectrum not real");
            }
            Some(_) if self.forms_disagree() => {
                report.note("gradient and Laplacian forms disagree");
            }
            Some(_) => {}
        }
        if !self.central {
            report.fail("gradient_at_identity", Some(Witness::from(&self.gradient_at_i)));
        }
        report
    }
}

pub fn check_central(g: &GardingOperator, seed: u64) -> Result<CentralityResult> {
    let n = g.n();
    let big_n = g.degree() as f64;
    let id = SymMatrix::identity(n);
    let grad = gradient(g, &id)?;
    let diag = grad.diag();
    let k = diag.iter().sum::<f64>() / n as f64;
    let scale = k.abs().max(f64::MIN_POSITIVE);
    let mut offdiag = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            offdiag = offdiag.max(grad.get(i, j).abs());
        }
    }
    let diag_dev = diag.iter().fold(0.0f64, |acc, d| acc.max((d - k).abs()));
    let offdiag_residual = offdiag / scale;
    let diag_residual = diag_dev / scale;
    let central = k > 0.0 && offdiag_residual <= CENTRAL_GRADIENT_TOL && diag_residual <= CENTRAL_GRADIENT_TOL;
    let g_i = g.evaluate(&id)?;
    let euler_defect = (big_n * g_i - k * n as f64).abs() / (big_n * g_i.abs()).max(f64::MIN_POSITIVE);

    let laplacian = laplacian_form(g, seed);
    let (laplacian_central, tracefree, spread, mean) = match laplacian {
        Ok((tf, spread, mean)) => {
            (Some(tf <= CENTRAL_LAPLACIAN_TOL && spread <= CENTRAL_LAPLACIAN_TOL && mean > 0.0), tf, spread, mean)
        }
        Err(_) => (None, f64::NAN, f64::NAN, f64::NAN),
    };
    Ok(CentralityResult {
        central,
        k,
        gradient_at_i: grad,
        offdiag_residual,
        diag_residual,
        euler_defect,
        laplacian_central,
        laplacian_tracefree_max: tracefree,
        laplacian_ratio_spread: spread,
        laplacian_ratio_mean: mean,
    })
}

fn laplacian_form(g: &GardingOperator, seed: u64) -> Result<(f64, f64, f64)> {
    let n = g.n();
    let big_n = g.degree() as f64;
    let mut tracefree = 0.0f64;
    for e in trace_free_basis(n) {
        tracefree = tracefree.max(garding_laplacian(g, &e)?.abs() / (e.frobenius_norm() * big_n));
    }
    let mut ratios = Vec::with_capacity(CENTRAL_SAMPLES);
    for i in 0..CENTRAL_SAMPLES {
        let mut rng = rng_for(seed, 0x6365_0000 + i as u64);
        let a0 = random_trace_free_with::<f64, _>(n, &mut rng);
        tracefree = tracefree.max(garding_laplacian(g, &a0)?.abs() / (a0.frobenius_norm() * big_n));
        let a = random_spd_with::<f64, _>(n, 1.0, &mut rng);
        ratios.push(garding_laplacian(g, &a)? / a.trace());
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((tracefree, (hi - lo) / mean.abs().max(f64::MIN_POSITIVE), mean))
}

/// The eigenvalues of the radial derivative at `A` separate those of `g`:
/// `λⱼ ≥ λ′ⱼ ≥ λⱼ₊₁`, with slack `1e−8·(1 + max|λ|)`.
pub fn interlace_check(g: &GardingOperator, a: &SymMatrix) -> Result<CheckReport> {
    let derived = GardingOperator::radial_derivative(g.clone())?;
    let outer = i_eigenvalues(g, a)?;
    let inner = i_eigenvalues(&derived, a)?;
    let mut report = CheckReport::new("interlace");
    let slack = INTERLACE_SLACK * (1.0 + outer.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let mut worst = f64::INFINITY;
    for (j, &mid) in inner.values.iter().enumerate() {
        let above = outer.values[j] - mid;
        let below = mid - outer.values[j + 1];
        worst = worst.min(above).min(below);
    }
    report.margin("min_gap", worst).margin("slack", slack);
    if worst < -slack {
        report.fail("min_gap", Some(Witness::from(a)));
        report.note(format!("outer {:?}, inner {:?}", outer.values, inner.values));
    }
    Ok(report)
}

/// Runs [`interlace_check`] over `samples` Gaussian symmetric matrices.
pub fn interlace_sampled(g: &GardingOperator, samples: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("interlace");
    let mut worst = f64::INFINITY;
    let mut failures = 0usize;
    for i in 0..samples {
        let a = random_symmetric_with::<f64, _>(g.n(), &mut rng_for(seed, i as u64));
        match interlace_check(g, &a) {
            Ok(r) => {
                worst =
                    worst.min(r.get("min_gap").unwrap_or(f64::NAN) / r.get("slack").unwrap_or(1.0) * INTERLACE_SLACK);
                if !r.pass {
                    failures += 1;
                    report.fail("min_gap", r.witness.clone());
                }
            }
            Err(err) => {
                failures += 1;
                if report.pass {
                    report.note(format!("sample {i}: {err}"));
                }
                report.fail("spectrum", Some(Witness::from(&a)));
                if matches!(err, Error::DegreeTooLow(_)) {
                    break;
                }
            }
        }
    }
    report.margin("min_relative_gap", worst).count("samples", samples).count("failures", failures);
    report
}

/// Gradient conjugation rule `∇g_h(I) = hᵗ·∇g(I)·h` over `trials` Haar `h`,
/// plus its diagonal specialization `D_e p_h = k·e` when `g` is `I`-central.
pub fn lemma22_check(g: &GardingOperator, trials: usize, seed: u64) -> Result<CheckReport> {
    let n = g.n();
    let id = SymMatrix::identity(n);
    let grad = gradient(g, &id)?;
    let centrality = check_central(g, seed)?;
    let mut report = CheckReport::new("lemma22");
    let mut worst_a = 0.0f64;
    let mut worst_c = 0.0f64;
    for i in 0..trials {
        let h = random_orthogonal_with::<f64, _>(n, &mut rng_for(seed, 0x6c32_0000 + i as u64));
        let conj = GardingOperator::conjugate(g.clone(), h.clone())?;
        let lhs = gradient(&conj, &id)?;
        let rhs = grad.congruence_transpose(&h);
        let err = lhs.sub(&rhs).frobenius_norm() / rhs.frobenius_norm().max(f64::MIN_POSITIVE);
        if err > worst_a {
            worst_a = err;
            if err > LEMMA22_TOL {
                report.fail("max_relative_error", Some(Witness::from(&h)));
            }
        }
        if centrality.central {
            let k = centrality.k;
            let dev = lhs.diag().iter().fold(0.0f64, |acc, d| acc.max((d - k).abs())) / k;
            if dev > worst_c {
                worst_c = dev;
                if dev > LEMMA22_TOL {
                    report.fail("diagonal_gradient_error", Some(Witness::from(&h)));
                }
            }
        }
    }
    report.margin("max_relative_error", worst_a).count("trials", trials);
    if centrality.central {
        report.margin("diagonal_gradient_error", worst_c);
    } else {
        report.note("diagonal specialization not applicable: g is not I-central");
    }
    Ok(report)
}

/// Eigenvalues of `conjugate(g, h)` at `A` against those of `g` at `hAhᵗ`.
pub fn conjugation_transfer_check(g: &GardingOperator, samples: usize, seed: u64) -> Result<CheckReport> {
    let n = g.n();
    let mut report = CheckReport::new("conjugation-transfer");
    let mut worst = 0.0f64;
    for i in 0..samples {
        let mut rng = rng_for(seed, 0x6374_0000 + i as u64);
        let h = random_orthogonal_with::<f64, _>(n, &mut rng);
        let a = random_symmetric_with::<f64, _>(n, &mut rng);
        let conj = GardingOperator::conjugate(g.clone(), h.clone())?;
        let lhs = i_eigenvalues(&conj, &a)?;
        let rhs = i_eigenvalues(g, &a.congruence(&h))?;
        let err = lhs.values.iter().zip(&rhs.values).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if err > worst {
            worst = err;
            if err > 1e-8 {
                report.fail("max_eigenvalue_error", Some(Witness::from(&a)));
            }
        }
    }
    report.margin("max_eigenvalue_error", worst).count("samples", samples);
    Ok(report)
}

/// Cone points of `g`: alternately a positive definite sample and a Gaussian
/// matrix shifted so that its smallest `I`-eigenvalue lands in `[0.05, 1]·(1 + ‖A₀‖)`.
/// Operators without a real spectrum at `A₀` fall back to the positive definite sample.
pub fn interior_cone_points(g: &GardingOperator, count: usize, seed: u64) -> Result<Vec<SymMatrix>> {
    let n = g.n();
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = rng_for(seed, 0x636f_0000 + i as u64);
        let spd = random_spd_with::<f64, _>(n, spread_for(i), &mut rng);
        if i % 2 == 0 {
            points.push(spd);
            continue;
        }
        let a0 = random_symmetric_with::<f64, _>(n, &mut rng);
        let delta = rng.gen_range(0.05..=1.0) * (1.0 + a0.frobenius_norm());
        let shifted = i_eigenvalues(g, &a0).map(|eig| a0.shift(delta - eig.min()));
        points.push(shifted.unwrap_or(spd));
    }
    Ok(points)
}

/// Cone of `g_L = g∘L` against the preimage of the cone of `g`: samples
/// `A = A₀ + sI` with `s` placing the smallest `I`-eigenvalue of `g_L` at
/// `±δ`, `δ ∈ [1e−3, 0.5]`, so that half the points sit just outside.
pub fn cone_transfer_check(g: &GardingOperator, map: &LinearMap, samples: usize, seed: u64) -> Result<CheckReport> {
    let n = g.n();
    let composed = GardingOperator::linear_transform(g.clone(), map.clone())?;
    let mut report = CheckReport::new("cone-transfer");
    let mut disagreements = 0usize;
    let mut inside = 0usize;
    for i in 0..samples {
        let mut rng = rng_for(seed, 0x6374_7200 + i as u64);
        let a0 = random_symmetric_with::<f64, _>(n, &mut rng);
        let delta = rng.gen_range(1e-3..=0.5);
        let side = if i % 2 == 0 { 1.0 } else { -1.0 };
        let lo = i_eigenvalues(&composed, &a0)?.min();
        let a = a0.shift(side * delta - lo);
        let lhs = in_garding_cone(&composed, &a)?.member;
        let rhs = in_garding_cone(g, &map.apply(&a))?.member;
        inside += usize::from(lhs);
        if lhs != rhs {
            disagreements += 1;
            report.fail("disagreements", Some(Witness::from(&a)));
        }
    }
    report.count("samples", samples).count("inside", inside).count("disagreements", disagreements);
    Ok(report)
}

/// `∇log g_L(A) = Lᵗ(∇log g(L(A)))` at cone points of `g_L`.
pub fn chain_rule_check(g: &GardingOperator, map: &LinearMap, samples: usize, seed: u64) -> Result<CheckReport> {
    let composed = GardingOperator::linear_transform(g.clone(), map.clone())?;
    let adjoint = map.adjoint();
    let mut report = CheckReport::new("chain-rule");
    let mut worst = 0.0f64;
    for a in interior_cone_points(&composed, samples, seed)? {
        let lhs = gradient(&composed, &a)?.scale(1.0 / composed.evaluate(&a)?);
        let la = map.apply(&a);
        let rhs = adjoint.apply(&gradient(g, &la)?.scale(1.0 / g.evaluate(&la)?));
        let err = lhs.sub(&rhs).frobenius_norm() / rhs.frobenius_norm().max(f64::MIN_POSITIVE);
        if err > worst {
            worst = err;
            if err > 1e-6 {
                report.fail("max_relative_error", Some(Witness::from(&a)));
            }
        }
    }
    report.margin("max_relative_error", worst).count("samples", samples);
    Ok(report)
}
