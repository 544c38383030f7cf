use garding_core::analysis::{
    chain_rule_check, check_central, check_hyperbolic, cone_transfer_check, conjugation_transfer_check,
    garding_eigenvalues, gradient, i_eigenvalues, in_garding_cone, interior_cone_points, interlace_sampled, profile,
};
use garding_core::matrix::{sym_eigen, Square, SymMatrix};
use garding_core::operator::{GardingOperator, LinearMap};
use garding_core::poly::{homogeneous_coefficients_from_evaluator, SparsePoly};
use garding_core::sampling::{random_orthogonal_with, random_spd, random_symmetric_with, rng_for};

fn hyperbolic_catalog() -> Vec<GardingOperator> {
    vec![
        GardingOperator::det(3).unwrap(),
        GardingOperator::sigma_k(4, 2).unwrap(),
        GardingOperator::ma_lag(4).unwrap(),
        GardingOperator::ma_lag(6).unwrap(),
        GardingOperator::quad_c(0.5).unwrap(),
        GardingOperator::radial_derivative(GardingOperator::det(4).unwrap()).unwrap(),
    ]
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn profile_ends_are_g_of_b_and_g_of_a() {
    for g in hyperbolic_catalog() {
        for i in 0..20u64 {
            let b = random_spd::<f64>(g.n(), 100 + i, 2.0);
            let a = random_symmetric_with::<f64, _>(g.n(), &mut rng_for(31, i));
            let p = profile(&g, &b, &a).unwrap();
            let (gb, ga) = (g.evaluate(&b).unwrap(), g.evaluate(&a).unwrap());
            let big_n = g.degree();
            assert!((p.coeffs[big_n] - gb).abs() <= 1e-8 * gb.abs(), "{}", g.name());
            let scale = gb.abs().max(1.0) * (1.0 + a.frobenius_norm()).powi(big_n as i32);
            assert!((p.coeffs[0] - ga).abs() <= 1e-9 * scale, "{}: {} vs {ga}", g.name(), p.coeffs[0]);
        }
    }
}

#[test]
fn eigenvalues_shift_and_scale() {
    for g in hyperbolic_catalog() {
        for i in 0..20u64 {
            let a = random_symmetric_with::<f64, _>(g.n(), &mut rng_for(32, i));
            let base = i_eigenvalues(&g, &a).unwrap().values;
            let s = 0.75 + i as f64 * 0.1;
            let shifted = i_eigenvalues(&g, &a.shift(s)).unwrap().values;
            let want: Vec<f64> = base.iter().map(|x| x + s).collect();
            assert!(close(&shifted, &want, 1e-6), "{}: {shifted:?} vs {want:?}", g.name());
            let scaled = i_eigenvalues(&g, &a.scale(3.0)).unwrap().values;
            let want: Vec<f64> = base.iter().map(|x| 3.0 * x).collect();
            assert!(close(&scaled, &want, 3e-6), "{}", g.name());
        }
    }
}

#[test]
fn det_eigenvalues_in_a_general_direction() {
    let g = GardingOperator::det(4).unwrap();
    for i in 0..50u64 {
        let b = random_spd::<f64>(4, 200 + i, 2.0);
        let a = random_symmetric_with::<f64, _>(4, &mut rng_for(33, i));
        let root_inv = sym_eigen(&b).unwrap().apply(|x| 1.0 / x.sqrt());
        let whitened = SymMatrix::symmetric_part(&root_inv.mul(&a).mul(&root_inv.to_square()));
        let want = sym_eigen(&whitened).unwrap().eigenvalues;
        let got = garding_eigenvalues(&g, &b, &a).unwrap().values;
        assert!(close(&got, &want, 1e-6 * (1.0 + want[0].abs())), "{got:?} vs {want:?}");
    }
}

#[test]
fn sampled_catalog_is_hyperbolic() {
    for g in hyperbolic_catalog() {
        let report = check_hyperbolic(&g, &SymMatrix::identity(g.n()), 100, 5);
        assert!(report.pass, "{}: {report:?}", g.name());
    }
    let report = check_hyperbolic(&GardingOperator::quad_c(-1.0).unwrap(), &SymMatrix::identity(2), 100, 5);
    assert!(!report.pass);
}

#[test]
fn det_gradient_matches_cofactor() {
    let g = GardingOperator::det(3).unwrap();
    let symbolic = GardingOperator::symbolic(
        3,
        homogeneous_coefficients_from_evaluator(
            |x: &[f64]| SymMatrix::from_entries(3, x.to_vec()).unwrap().to_square().det(),
            3,
            6,
        ),
    )
    .unwrap();
    for i in 0..50u64 {
        let a = random_symmetric_with::<f64, _>(3, &mut rng_for(34, i)).shift(2.5);
        let det = g.evaluate(&a).unwrap();
        let want = sym_eigen(&a).unwrap().apply(|x| det / x);
        let fd = gradient(&g, &a).unwrap();
        let exact = gradient(&symbolic, &a).unwrap();
        let scale = 1.0 + want.frobenius_norm();
        assert!(fd.max_abs_diff(&want) <= 1e-7 * scale, "finite differences off by {:e}", fd.max_abs_diff(&want));
        assert!(exact.max_abs_diff(&want) <= 1e-10 * scale);
    }
}

#[test]
fn euler_relation_for_gradients() {
    for g in hyperbolic_catalog() {
        for i in 0..10u64 {
            let a = random_symmetric_with::<f64, _>(g.n(), &mut rng_for(35, i)).shift(1.0);
            let lhs = gradient(&g, &a).unwrap().dot(&a);
            let rhs = g.degree() as f64 * g.evaluate(&a).unwrap();
            let scale = g.degree() as f64 * (1.0 + a.frobenius_norm()).powi(g.degree() as i32);
            assert!((lhs - rhs).abs() <= 1e-7 * scale, "{}: {lhs} vs {rhs}", g.name());
        }
    }
}

#[test]
fn products_derivatives_and_conjugates_stay_central() {
    let mut rng = rng_for(36, 0);
    let q: Square = random_orthogonal_with(3, &mut rng);
    let ops = [
        GardingOperator::product(GardingOperator::det(3).unwrap(), GardingOperator::sigma_k(3, 2).unwrap()).unwrap(),
        GardingOperator::radial_derivative(GardingOperator::sigma_k(4, 3).unwrap()).unwrap(),
        GardingOperator::radial_derivative(GardingOperator::ma_lag(4).unwrap()).unwrap(),
        GardingOperator::conjugate(GardingOperator::sigma_k(3, 2).unwrap(), q).unwrap(),
    ];
    for g in ops {
        let res = check_central(&g, 9).unwrap();
        assert!(res.central, "{}: {res:?}", g.name());
        assert!(res.k > 0.0);
        assert!(res.euler_defect <= 1e-8);
    }
}

#[test]
fn lopsided_monomial_is_not_central() {
    // a₁₁²·a₂₂
    let poly = SparsePoly::from_terms(3, [(vec![2, 0, 1], 1.0)]).unwrap();
    let g = GardingOperator::symbolic(2, poly).unwrap();
    let res = check_central(&g, 9).unwrap();
    assert!(!res.central);
    assert!((res.diag_residual - 1.0 / 3.0).abs() < 1e-8, "{res:?}");
}

#[test]
fn conjugation_transfers_eigenvalues() {
    for g in [GardingOperator::sigma_k(3, 2).unwrap(), GardingOperator::ma_lag(4).unwrap()] {
        let report = conjugation_transfer_check(&g, 30, 7).unwrap();
        assert!(report.pass, "{}: {report:?}", g.name());
    }
}

fn trace_boost(n: usize) -> LinearMap {
    LinearMap::from_fn(n, |a| a.shift(0.3 * a.trace()))
}

fn spd_congruence(n: usize) -> LinearMap {
    let p = Square::from_fn(n, |i, j| if i == j { 1.0 + 0.1 * i as f64 } else { 0.2 / (1.0 + (i + j) as f64) });
    LinearMap::from_fn(n, move |a| a.congruence(&p))
}

#[test]
fn chain_rule_for_linear_transforms() {
    for g in [GardingOperator::det(3).unwrap(), GardingOperator::sigma_k(3, 2).unwrap()] {
        for map in [trace_boost(3), spd_congruence(3)] {
            let report = chain_rule_check(&g, &map, 30, 8).unwrap();
            assert!(report.pass, "{}: {report:?}", g.name());
        }
    }
}

#[test]
fn cone_of_composition_is_preimage() {
    for g in [GardingOperator::det(3).unwrap(), GardingOperator::sigma_k(3, 2).unwrap()] {
        for map in [trace_boost(3), spd_congruence(3)] {
            let report = cone_transfer_check(&g, &map, 60, 8).unwrap();
            assert!(report.pass, "{}: {report:?}", g.name());
            assert_eq!(report.counts["inside"], 30);
        }
    }
}

#[test]
fn interior_points_are_in_the_cone() {
    for g in hyperbolic_catalog() {
        for a in interior_cone_points(&g, 20, 4).unwrap() {
            let cert = in_garding_cone(&g, &a).unwrap();
            assert!(cert.member, "{}: {cert:?}", g.name());
        }
    }
}

#[test]
fn sampled_interlacing() {
    for g in hyperbolic_catalog() {
        let report = interlace_sampled(&g, 40, 3);
        assert!(report.pass, "{}: {report:?}", g.name());
    }
}

/// `(tr/2 ± μ₁ ± ⋯ ± μₘ)/m` over all sign patterns, nonincreasing.
fn ma_lag_spectrum(a: &SymMatrix) -> Vec<f64> {
    let (_, mu) = garding_core::matrix::skew_hermitian_part(a).unwrap();
    let m = mu.len();
    let mut out: Vec<f64> = (0..1u32 << m)
        .map(|mask| {
            let s: f64 = mu.iter().enumerate().map(|(k, v)| if mask >> k & 1 == 1 { -v } else { *v }).sum();
            (0.5 * a.trace() + s) / m as f64
        })
        .collect();
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

#[test]
fn ma_lag_spectrum_of_nearly_rank_one_matrices() {
    // one large eigenvalue over a tight bulk gives two clusters of 2^{m−1} roots
    for n in [4, 6, 8] {
        let g = GardingOperator::ma_lag(n).unwrap();
        for i in 0..100u64 {
            let mut rng = rng_for(37, i);
            let v = random_symmetric_with::<f64, _>(n, &mut rng).diag();
            let bulk = random_symmetric_with::<f64, _>(n, &mut rng).scale(1e-3);
            let a = SymMatrix::from_fn(n, |r, c| 4.0 * v[r] * v[c]).add(&bulk).shift(0.06);
            let want = ma_lag_spectrum(&a);
            let got = i_eigenvalues(&g, &a).unwrap_or_else(|e| panic!("n={n} i={i}: {e}")).values;
            assert!(close(&got, &want, 1e-8 * (1.0 + want[0].abs())), "n={n} i={i}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn ma_lag_spectrum_of_gaussian_matrices() {
    // n = 8 puts 16 roots with several close pairs in a narrow middle band
    for n in [6, 8] {
        let g = GardingOperator::ma_lag(n).unwrap();
        for i in 0..100u64 {
            let a = random_symmetric_with::<f64, _>(n, &mut rng_for(5, i));
            let want = ma_lag_spectrum(&a);
            let got = i_eigenvalues(&g, &a).unwrap_or_else(|e| panic!("n={n} i={i}: {e}")).values;
            assert!(close(&got, &want, 1e-8 * (1.0 + want[0].abs())), "n={n} i={i}: {got:?} vs {want:?}");
        }
    }
}
