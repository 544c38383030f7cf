//! Determinant majorization `g(A)^{1/N} ≥ g(I)^{1/N}·(det A)^{1/n}` on the
//! positive definite cone, its gradient-determinant form, the orthant version
//! for polynomials on ℝⁿ, and nonnegativity of diagonal-restriction
//! coefficients.
//!
//! Everything here samples and descends; a pass means no counterexample was
//! found, with the smallest observed margin recorded.

use rand::Rng;
use serde::Serialize;

use crate::analysis::{gradient, in_garding_cone, interior_cone_points, spread_for};
use crate::error::{Error, Result};
use crate::matrix::{log_det_spd, sym_eigen, Square, SymMatrix};
use crate::operator::GardingOperator;
use crate::poly::{homogeneous_coefficients_from_evaluator, SparsePoly};
use crate::report::{CheckReport, Witness};
use crate::sampling::{
    random_orthogonal_with, random_positive_vector_with, random_spd_with, random_trace_free_with, rng_for,
};

/// `min_ratio ≥ 1 − MAJORIZATION_TOL` passes.
pub const MAJORIZATION_TOL: f64 = 1e-6;
const SHARPNESS_TOL: f64 = 1e-9;
const GRADIENT_DET_TOL: f64 = 1e-6;
const STEP_START: f64 = 0.5;
const STEP_FLOOR: f64 = 1e-6;

/// `exp((1/N)·ln g(A) − (1/N)·ln g(I) − (1/n)·ln det A)`.
pub fn ratio(g: &GardingOperator, a: &SymMatrix) -> Result<f64> {
    let n = g.n() as f64;
    let big_n = g.degree() as f64;
    let log_det = log_det_spd(a)?.ok_or_else(|| Error::Domain("matrix is not positive definite".into()))?;
    let log_g = g.log_evaluate(a)?;
    let log_g_i = g.log_evaluate(&SymMatrix::identity(g.n()))?;
    Ok((log_g / big_n - log_g_i / big_n - log_det / n).exp())
}

/// `g(I)^{n/N} / nⁿ`.
pub fn gamma(g: &GardingOperator) -> Result<f64> {
    let n = g.n() as f64;
    let log_g_i = g.log_evaluate(&SymMatrix::identity(g.n()))?;
    Ok((n / g.degree() as f64 * log_g_i - n * n.ln()).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainFailure {
    pub message: String,
    pub witness: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub pass: bool,
    pub min_ratio: f64,
    #[serde(serialize_with = "rows")]
    pub argmin: SymMatrix,
    pub ratio_at_identity: f64,
    pub samples_used: usize,
    /// Accepted descent steps.
    pub refinement_steps: usize,
    pub refinement_iters: usize,
    pub sharp_at_identity: bool,
    pub equality_regime: bool,
    pub gamma: f64,
    /// Set when `g` is not positive at some sample, which already falsifies the inequality.
    pub domain_failure: Option<DomainFailure>,
}

fn rows<S: serde::Serializer>(a: &SymMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    a.to_rows().serialize(s)
}

impl MajorizationReport {
    pub fn to_report(&self) -> CheckReport {
        let mut report = CheckReport::new("majorization");
        report
            .margin("min_ratio", self.min_ratio)
            .margin("min_ratio_minus_one", self.min_ratio - 1.0)
            .margin("ratio_at_identity", self.ratio_at_identity)
            .margin("gamma", self.gamma)
            .count("samples", self.samples_used)
            .count("refinement_iters", self.refinement_iters)
            .count("refinement_steps", self.refinement_steps);
        report.witness = Some(Witness::from(&self.argmin));
        report.note(format!("numerically certified at {} samples, not proven", self.samples_used));
        if self.equality_regime {
            report.note("equality regime");
        }
        if !self.sharp_at_identity {
            report.note("ratio at I differs from 1");
        }
        if let Some(fail) = &self.domain_failure {
            report.note(fail.message.clone());
            report.fail("domain", Some(Witness::Matrix(fail.witness.clone())));
        } else if !self.pass {
            report.fail("min_ratio", Some(Witness::from(&self.argmin)));
        }
        report
    }
}

/// Samples the ratio at `I` and at `samples` positive definite matrices of
/// spreads 1, 2, 3, then runs `refine_iters` steps of multiplicative descent
/// `A ← A^{1/2}·exp(∓ηS)·A^{1/2}` from the worst sample along random
/// trace-free unit directions `S`.
pub fn check_majorization(
    g: &GardingOperator,
    samples: usize,
    refine_iters: usize,
    seed: u64,
) -> Result<MajorizationReport> {
    let n = g.n();
    let id = SymMatrix::identity(n);
    let ratio_at_identity = ratio(g, &id)?;
    let gamma = gamma(g)?;
    let mut best = (ratio_at_identity, id.clone());
    let mut report = MajorizationReport {
        pass: false,
        min_ratio: ratio_at_identity,
        argmin: id,
        ratio_at_identity,
        samples_used: 1,
        refinement_steps: 0,
        refinement_iters: 0,
        sharp_at_identity: (ratio_at_identity - 1.0).abs() <= SHARPNESS_TOL,
        equality_regime: false,
        gamma,
        domain_failure: None,
    };

    let sample_ratio = |a: &SymMatrix, report: &mut MajorizationReport| -> Result<Option<f64>> {
        match ratio(g, a) {
            Ok(r) => Ok(Some(r)),
            Err(Error::Domain(msg)) => {
                report.domain_failure = Some(DomainFailure { message: msg, witness: a.to_rows() });
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };

    for i in 1..=samples {
        let a = random_spd_with::<f64, _>(n, spread_for(i), &mut rng_for(seed, i as u64));
        report.samples_used += 1;
        match sample_ratio(&a, &mut report)? {
            Some(r) if r < best.0 => best = (r, a),
            Some(_) => {}
            None => return Ok(finish(report, best)),
        }
    }

    // descent runs on det A = 1, which the ratio does not see
    let (mut current, mut a) = best.clone();
    a = normalize_det(&a)?;
    let mut eta = STEP_START;
    for step in 0..refine_iters {
        report.refinement_iters += 1;
        let mut rng = rng_for(seed, (1u64 << 40) + step as u64);
        let s = random_trace_free_with::<f64, _>(n, &mut rng);
        let root = sym_eigen(&a)?.apply(f64::sqrt);
        let mut accepted = false;
        for sign in [1.0, -1.0] {
            let e = sym_eigen(&s.scale(-sign * eta))?.apply(f64::exp);
            let candidate = normalize_det(&e.congruence(&root.to_square()))?;
            match sample_ratio(&candidate, &mut report)? {
                Some(r) if r < current => {
                    current = r;
                    a = candidate;
                    accepted = true;
                    break;
                }
                Some(_) => {}
                None => return Ok(finish(report, best)),
            }
        }
        if accepted {
            report.refinement_steps += 1;
            if current < best.0 {
                best = (current, a.clone());
            }
        } else {
            eta *= 0.5;
            if eta < STEP_FLOOR {
                eta = STEP_START;
            }
        }
    }
    Ok(finish(report, best))
}

fn finish(mut report: MajorizationReport, best: (f64, SymMatrix)) -> MajorizationReport {
    report.min_ratio = best.0;
    report.argmin = best.1;
    report.pass = report.domain_failure.is_none() && report.min_ratio >= 1.0 - MAJORIZATION_TOL;
    report.equality_regime = (report.min_ratio - 1.0).abs() <= MAJORIZATION_TOL;
    report
}

fn normalize_det(a: &SymMatrix) -> Result<SymMatrix> {
    let log_det = log_det_spd(a)?.ok_or_else(|| Error::Domain("descent left the positive definite cone".into()))?;
    Ok(a.scale((-log_det / a.n() as f64).exp()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientDetBound {
    pub det_value: f64,
    pub gamma: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

impl GradientDetBound {
    pub fn margin(&self) -> f64 {
        self.det_value - self.gamma
    }
}

/// `M = ∇(g^{1/N})(B) = (1/N)·g(B)^{(1−N)/N}·∇g(B)` must be positive definite
/// with `det M ≥ γ`. `M` is homogeneous of degree 0, so it is computed at
/// `B/‖B‖`.
pub fn gradient_det_bound(g: &GardingOperator, b: &SymMatrix) -> Result<GradientDetBound> {
    let cert = in_garding_cone(g, b)?;
    if !cert.member {
        return Err(Error::Domain(format!("B is outside the cone (margin {:e})", cert.margin)));
    }
    let big_n = g.degree() as f64;
    let unit = b.scale(1.0 / b.frobenius_norm());
    let g_unit = g.evaluate(&unit)?;
    let m = gradient(g, &unit)?.scale(g_unit.powf((1.0 - big_n) / big_n) / big_n);
    let eig = sym_eigen(&m)?;
    let det_value: f64 = eig.eigenvalues.iter().product();
    let gamma = gamma(g)?;
    let min_eigenvalue = eig.min_eigenvalue();
    let pass = min_eigenvalue > 0.0 && det_value >= gamma * (1.0 - GRADIENT_DET_TOL);
    Ok(GradientDetBound { det_value, gamma, min_eigenvalue, pass })
}

/// Runs [`check_majorization`] and [`gradient_det_bound`] at `samples` cone
/// points; passes when both succeed or both fail.
pub fn check_prop16_consistency(
    g: &GardingOperator,
    samples: usize,
    refine_iters: usize,
    seed: u64,
) -> Result<CheckReport> {
    let major = check_majorization(g, samples, refine_iters, seed)?;
    let mut report = CheckReport::new("gradient-det");
    let mut bound_ok = true;
    let mut min_margin = f64::INFINITY;
    let mut min_rel = f64::INFINITY;
    let mut min_eig = f64::INFINITY;
    let mut worst: Option<SymMatrix> = None;
    for b in interior_cone_points(g, samples, seed)? {
        let bound = gradient_det_bound(g, &b)?;
        min_eig = min_eig.min(bound.min_eigenvalue);
        let rel = bound.margin() / bound.gamma;
        if rel < min_rel {
            min_rel = rel;
            worst = Some(b.clone());
        }
        min_margin = min_margin.min(bound.margin());
        bound_ok &= bound.pass;
    }
    report
        .margin("min_det_margin", min_margin)
        .margin("min_relative_det_margin", min_rel)
        .margin("min_gradient_eigenvalue", min_eig)
        .margin("min_ratio", major.min_ratio)
        .count("samples", samples);
    report.note(format!("majorization {}, gradient-determinant bound {}", verdict(major.pass), verdict(bound_ok)));
    if min_rel.abs() <= GRADIENT_DET_TOL {
        report.note("equality regime");
    }
    if major.pass != bound_ok {
        report.fail("consistency", worst.as_ref().map(Witness::from));
    } else if !bound_ok {
        report.note("both forms fail");
        report.fail("min_relative_det_margin", worst.as_ref().map(Witness::from));
    }
    Ok(report)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "fails"
    }
}

/// `p(x)^{1/N} ≥ p(e)^{1/N}·(x₁⋯xₙ)^{1/n}` on the positive orthant, after
/// checking its hypotheses: nonnegative coefficients and `D_e p = k·e`, `k > 0`.
/// The conclusion is only sampled when both hypotheses hold.
pub fn basic_lemma_check(p: &SparsePoly, samples: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("basic-lemma");
    let n = p.nvars();
    let big_n = p.degree();
    if !p.is_homogeneous() || p.is_zero() || big_n == 0 {
        let (lo, hi) = p.degree_range();
        report.note(format!("not homogeneous of positive degree: term degrees {lo}..{hi}"));
        report.fail("homogeneity", None);
        return report;
    }
    let e = vec![1.0; n];
    let min_coeff = p.min_coeff();
    let hyp1 = min_coeff >= -1e-12;
    let grad: Vec<f64> = (0..n).map(|i| p.partial(i).eval(&e).expect("matching arity")).collect();
    let k = grad.iter().sum::<f64>() / n as f64;
    let spread = grad.iter().fold(0.0f64, |m, d| m.max((d - k).abs()));
    let hyp2 = k > 0.0 && spread <= 1e-8 * k.abs().max(1.0);
    let p_e = p.eval(&e).expect("matching arity");
    let euler = (big_n as f64 * p_e - k * n as f64).abs();
    report
        .margin("min_coeff", min_coeff)
        .margin("k", k)
        .margin("gradient_spread", spread)
        .margin("euler_defect", euler);
    if !hyp1 {
        report.note("hypothesis (1) fails: negative coefficient");
        report.fail("hypothesis_1", None);
    }
    if !hyp2 {
        report.note("hypothesis (2) fails: D_e p is not a positive multiple of e");
        report.fail("hypothesis_2", Some(Witness::Vector(grad)));
    }
    if !(hyp1 && hyp2) {
        report.note("conclusion not asserted");
        return report;
    }
    if euler > 1e-8 * (1.0 + big_n as f64 * p_e.abs()) {
        report.note("Euler relation N·p(e) = k·n violated");
        report.fail("euler_defect", None);
    }

    let log_pe = p_e.ln();
    let mut min_log = f64::INFINITY;
    let mut argmin = e.clone();
    for i in 0..=samples {
        let x = if i == 0 {
            e.clone()
        } else {
            random_positive_vector_with::<f64, _>(n, spread_for(i), &mut rng_for(seed, i as u64))
        };
        let px = p.eval(&x).expect("matching arity");
        let log_gap = if px > 0.0 {
            px.ln() / big_n as f64 - log_pe / big_n as f64 - x.iter().map(|v| v.ln()).sum::<f64>() / n as f64
        } else {
            f64::NEG_INFINITY
        };
        if log_gap < min_log {
            min_log = log_gap;
            argmin = x;
        }
    }
    let min_ratio = min_log.exp();
    report.margin("min_ratio", min_ratio).count("samples", samples + 1);
    if min_ratio < 1.0 - 1e-9 {
        report.fail("min_ratio", Some(Witness::Vector(argmin)));
    } else if min_ratio - 1.0 <= 1e-9 {
        report.note("equality regime");
    }
    report
}

/// Largest sampling grid [`diagonal_restriction`] will attempt.
pub const RESTRICTION_GRID_LIMIT: f64 = 4e6;

/// `p_h(x) = g(h·diag(x)·hᵗ)` as a polynomial in `x`, `h = I` when absent.
pub fn diagonal_restriction(g: &GardingOperator, h: Option<&Square>) -> Result<SparsePoly> {
    // recovery samples a tensor grid of (N + 1)^{n−1} points
    let grid = (g.degree() as f64 + 1.0).powi(g.n().saturating_sub(1) as i32);
    if grid > RESTRICTION_GRID_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "diagonal restriction of {} needs {grid:.3e} evaluations, above the limit of {RESTRICTION_GRID_LIMIT:e}",
            g.name()
        )));
    }
    let op = match h {
        Some(h) => GardingOperator::conjugate(g.clone(), h.clone())?,
        None => g.clone(),
    };
    let mut failure = None;
    let poly = homogeneous_coefficients_from_evaluator(
        |x: &[f64]| match op.evaluate(&SymMatrix::diagonal(x)) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        op.degree(),
        op.n(),
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(poly),
    }
}

/// Max relative mismatch between `p` and `g_h` on random positive diagonals.
fn restriction_audit(g: &GardingOperator, h: &Square, p: &SparsePoly, seed: u64) -> Result<f64> {
    let op = GardingOperator::conjugate(g.clone(), h.clone())?;
    let mut worst = 0.0f64;
    for i in 0..3 {
        let mut rng = rng_for(seed, 0x6175_0000 + i);
        let x: Vec<f64> = (0..g.n()).map(|_| rng.gen_range(0.5..2.0)).collect();
        let want = op.evaluate(&SymMatrix::diagonal(&x))?;
        let got = p.eval(&x)?;
        worst = worst.max((want - got).abs() / (1.0 + want.abs()));
    }
    Ok(worst)
}

/// Diagonal-restriction coefficients of `conjugate(g, h)` for `h = I` and
/// `h_samples` Haar-random `h` must satisfy `a_α ≥ −1e−8·(1 + max|a|)`.
pub fn diag_coefficient_check(g: &GardingOperator, h_samples: usize, seed: u64) -> Result<CheckReport> {
    let n = g.n();
    let mut report = CheckReport::new("diag-coeffs");
    let mut worst = f64::INFINITY;
    let mut audit = 0.0f64;
    for i in 0..=h_samples {
        let h = if i == 0 {
            Square::identity(n)
        } else {
            random_orthogonal_with::<f64, _>(n, &mut rng_for(seed, 0x6463_0000 + i as u64))
        };
        let p = diagonal_restriction(g, Some(&h))?;
        let normalized = p.min_coeff().min(0.0) / (1.0 + p.max_abs_coeff());
        audit = audit.max(restriction_audit(g, &h, &p, seed + i as u64)?);
        if normalized < worst {
            worst = normalized;
            if normalized < -1e-8 {
                report.fail("min_normalized_coeff", Some(Witness::from(&h)));
            }
        }
    }
    report.margin("min_normalized_coeff", worst).margin("restriction_audit", audit).count("orthogonals", h_samples + 1);
    if audit > 1e-6 {
        report.note("restricted polynomial does not reproduce the operator");
        report.fail("restriction_audit", None);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_examples() {
        let det = GardingOperator::det(3).unwrap();
        let a = random_spd_with::<f64, _>(3, 2.0, &mut rng_for(1, 1));
        assert!((ratio(&det, &a).unwrap() - 1.0).abs() < 1e-12);
        let s2 = GardingOperator::sigma_k(3, 2).unwrap();
        let want = 11f64.sqrt() / (3f64.sqrt() * 6f64.powf(1.0 / 3.0));
        assert!((ratio(&s2, &SymMatrix::diagonal(&[1.0, 2.0, 3.0])).unwrap() - want).abs() < 1e-12);
        let ma = GardingOperator::ma_lag(4).unwrap();
        assert!((ratio(&ma, &SymMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn majorization_examples() {
        let r = check_majorization(&GardingOperator::det(4).unwrap(), 50, 20, 1).unwrap();
        assert!(r.pass && (r.min_ratio - 1.0).abs() < 1e-10 && r.sharp_at_identity && r.equality_regime);
        let q = check_majorization(&GardingOperator::quad_c(0.5).unwrap(), 100, 100, 1).unwrap();
        assert!(q.pass, "{q:?}");
        assert!(q.argmin.get(0, 1).abs() < 1e-2 * q.argmin.frobenius_norm(), "{q:?}");
        let bad = check_majorization(&GardingOperator::quad_c(1.5).unwrap(), 300, 0, 1).unwrap();
        assert!(!bad.pass && bad.domain_failure.is_some());
    }

    #[test]
    fn gradient_det_examples() {
        let r = gradient_det_bound(&GardingOperator::det(2).unwrap(), &SymMatrix::diagonal(&[1.0, 4.0])).unwrap();
        assert!(r.pass && (r.det_value - 0.25).abs() < 1e-9 && (r.gamma - 0.25).abs() < 1e-15);
        let s = gradient_det_bound(&GardingOperator::sigma_k(3, 2).unwrap(), &SymMatrix::identity(3)).unwrap();
        let want = 3f64.powf(-1.5);
        assert!((s.det_value - want).abs() < 1e-9 && (s.gamma - want).abs() < 1e-12 && s.pass);
        let outside = gradient_det_bound(&GardingOperator::det(2).unwrap(), &SymMatrix::diagonal(&[1.0, -1.0]));
        assert!(matches!(outside, Err(Error::Domain(_))));
    }

    #[test]
    fn basic_lemma_examples() {
        let am = SparsePoly::from_terms(2, [(vec![1, 0], 0.5), (vec![0, 1], 0.5)]).unwrap();
        let r = basic_lemma_check(&am, 100, 1);
        assert!(r.pass && (r.get("k").unwrap() - 0.5).abs() < 1e-15);
        let prod = SparsePoly::from_terms(3, [(vec![1, 1, 1], 1.0)]).unwrap();
        let r = basic_lemma_check(&prod, 100, 1);
        assert!(r.pass && (r.get("min_ratio").unwrap() - 1.0).abs() < 1e-12);
        let eps = SparsePoly::from_terms(2, [(vec![2, 0], 0.1), (vec![1, 1], 1.0)]).unwrap();
        let r = basic_lemma_check(&eps, 100, 1);
        assert!(!r.pass && r.failing.as_deref() == Some("hypothesis_2"));
        assert!(r.notes.iter().any(|s| s == "conclusion not asserted"));
    }

    #[test]
    fn diagonal_restrictions() {
        let p = diagonal_restriction(&GardingOperator::det(2).unwrap(), None).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.coeff(&[1, 1]) - 1.0).abs() < 1e-12);
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let h = Square::from_rows(&[vec![c, -c], vec![c, c]]).unwrap();
        let q = diagonal_restriction(&GardingOperator::quad_c(0.5).unwrap(), Some(&h)).unwrap();
        for (alpha, want) in [([2, 0], 0.125), ([1, 1], 0.75), ([0, 2], 0.125)] {
            assert!((q.coeff(&alpha) - want).abs() < 1e-12, "{q:?}");
        }
        let r = diag_coefficient_check(&GardingOperator::sigma_k(3, 2).unwrap(), 5, 1).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
