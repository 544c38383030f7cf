use garding_core::majorization::{
    basic_lemma_check, check_majorization, diagonal_restriction, gradient_det_bound, ratio,
};
use garding_core::matrix::{Square, SymMatrix};
use garding_core::operator::GardingOperator;
use garding_core::poly::SparsePoly;
use garding_core::sampling::{random_orthogonal_with, random_spd, rng_for};

fn central_catalog() -> Vec<GardingOperator> {
    vec![
        GardingOperator::det(3).unwrap(),
        GardingOperator::sigma_k(4, 2).unwrap(),
        GardingOperator::ma_lag(4).unwrap(),
        GardingOperator::ma_lag(6).unwrap(),
        GardingOperator::quad_c(0.5).unwrap(),
        GardingOperator::norm2_det(3).unwrap(),
        GardingOperator::radial_derivative(GardingOperator::det(4).unwrap()).unwrap(),
    ]
}

#[test]
fn ratio_is_scale_invariant() {
    for g in central_catalog() {
        for i in 0..20u64 {
            let a = random_spd::<f64>(g.n(), 300 + i, 2.0);
            let base = ratio(&g, &a).unwrap();
            for c in [0.1, 0.7, 3.0, 10.0] {
                let r = ratio(&g, &a.scale(c)).unwrap();
                assert!((r - base).abs() <= 1e-10, "{}: {r} vs {base}", g.name());
            }
        }
    }
}

#[test]
fn equality_at_identity() {
    for g in central_catalog() {
        let r = ratio(&g, &SymMatrix::identity(g.n())).unwrap();
        assert!((r - 1.0).abs() <= 1e-12, "{}: {r}", g.name());
    }
}

#[test]
fn ratio_examples() {
    let s2 = GardingOperator::sigma_k(3, 2).unwrap();
    let want = 11f64.sqrt() / (3f64.sqrt() * 6f64.powf(1.0 / 3.0));
    assert!((ratio(&s2, &SymMatrix::diagonal(&[1.0, 2.0, 3.0])).unwrap() - want).abs() < 1e-12);
    let det = GardingOperator::det(3).unwrap();
    for seed in 0..20 {
        assert!((ratio(&det, &random_spd::<f64>(3, seed, 3.0)).unwrap() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn orthogonally_invariant_reports_do_not_depend_on_basis() {
    for g in [GardingOperator::det(3).unwrap(), GardingOperator::sigma_k(3, 2).unwrap()] {
        let plain = check_majorization(&g, 200, 50, 17).unwrap();
        let q: Square = random_orthogonal_with(3, &mut rng_for(41, 0));
        let conj = GardingOperator::conjugate(g.clone(), q).unwrap();
        let rotated = check_majorization(&conj, 200, 50, 17).unwrap();
        assert!((plain.min_ratio - rotated.min_ratio).abs() <= 1e-9, "{}", g.name());
    }
}

#[test]
fn ma_lag_improves_the_determinant_bound() {
    let g = GardingOperator::ma_lag(4).unwrap();
    for seed in 0..500 {
        let a = random_spd::<f64>(4, 1000 + seed, 1.0 + (seed % 3) as f64);
        let lhs = g.evaluate(&a).unwrap().powf(0.25);
        let det = a.to_square().det().powf(0.25);
        assert!(lhs >= 2.0 * det * (1.0 - 1e-12), "seed {seed}: {lhs} < 2·{det}");
    }
}

#[test]
fn gradient_det_bound_is_tight_for_det() {
    for n in 2..=5 {
        let g = GardingOperator::det(n).unwrap();
        for seed in 0..20 {
            let b = random_spd::<f64>(n, 500 + seed, 2.0);
            let bound = gradient_det_bound(&g, &b).unwrap();
            assert!(bound.pass);
            assert!(bound.margin().abs() <= 1e-8, "n={n}: {:e}", bound.margin());
        }
    }
}

#[test]
fn gradient_det_bound_rejects_points_outside_the_cone() {
    let g = GardingOperator::det(2).unwrap();
    assert!(gradient_det_bound(&g, &SymMatrix::diagonal(&[1.0, -1.0])).is_err());
}

fn eps_family(eps: f64) -> SparsePoly {
    SparsePoly::from_terms(2, [(vec![2, 0], eps), (vec![1, 1], 1.0)]).unwrap()
}

#[test]
fn hypothesis_two_fails_for_every_positive_epsilon() {
    for eps in [1e-6, 1e-3, 0.1, 0.5, 1.0, 10.0] {
        let report = basic_lemma_check(&eps_family(eps), 100, 3);
        assert!(!report.pass, "eps={eps}");
        assert_eq!(report.failing.as_deref(), Some("hypothesis_2"), "eps={eps}");
        assert!(report.get("min_coeff").unwrap() >= 0.0);
        assert!(report.notes.iter().any(|n| n.contains("conclusion not asserted")));
    }
    let report = basic_lemma_check(&eps_family(0.0), 100, 3);
    assert!(report.pass, "{report:?}");
}

#[test]
fn basic_lemma_examples() {
    let am = SparsePoly::from_terms(2, [(vec![1, 0], 0.5), (vec![0, 1], 0.5)]).unwrap();
    let report = basic_lemma_check(&am, 200, 1);
    assert!(report.pass, "{report:?}");
    let prod = SparsePoly::from_terms(3, [(vec![1, 1, 1], 1.0)]).unwrap();
    assert!(basic_lemma_check(&prod, 200, 1).pass);
    let negative = SparsePoly::from_terms(2, [(vec![2, 0], 1.0), (vec![1, 1], -0.5), (vec![0, 2], 1.0)]).unwrap();
    let report = basic_lemma_check(&negative, 50, 1);
    assert_eq!(report.failing.as_deref(), Some("hypothesis_1"));
}

#[test]
fn oversized_restriction_is_refused() {
    let err = diagonal_restriction(&GardingOperator::ma_lag(8).unwrap(), None).unwrap_err();
    assert!(err.to_string().contains("evaluations"), "{err}");
}
