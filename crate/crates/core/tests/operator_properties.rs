use garding_core::matrix::{complex_structure, entry_count, packed_position, sym_eigen, Square, SymMatrix};
use garding_core::operator::{elementary_symmetric, GardingOperator, LinearMap};
use garding_core::poly::SparsePoly;
use garding_core::sampling::{random_orthogonal_with, random_symmetric_with, rng_for};

fn catalog() -> Vec<GardingOperator> {
    vec![
        GardingOperator::det(3).unwrap(),
        GardingOperator::sigma_k(4, 2).unwrap(),
        GardingOperator::ma_lag(4).unwrap(),
        GardingOperator::ma_lag(6).unwrap(),
        GardingOperator::quad_c(0.5).unwrap(),
        GardingOperator::quad_c(-1.0).unwrap(),
        GardingOperator::norm2_det(3).unwrap(),
        GardingOperator::radial_derivative(GardingOperator::det(4).unwrap()).unwrap(),
        GardingOperator::product(GardingOperator::det(3).unwrap(), GardingOperator::sigma_k(3, 1).unwrap()).unwrap(),
    ]
}

fn frobenius_square_poly(n: usize) -> SparsePoly {
    let terms = (0..entry_count(n)).map(|k| {
        let (i, j) = packed_position(n, k);
        let mut alpha = vec![0; entry_count(n)];
        alpha[k] = 2;
        (alpha, if i == j { 1.0 } else { 2.0 })
    });
    SparsePoly::from_terms(entry_count(n), terms).unwrap()
}

/// `Π (tr/2 + Σ ±μⱼ)` with the signs enumerated as bit masks and `A_sk` built
/// from dense products with `J`.
fn ma_lag_by_masks(a: &SymMatrix) -> f64 {
    let n = a.n();
    let j = complex_structure::<f64>(n).unwrap();
    let full = a.to_square();
    let jaj = j.mul(&full).mul(&j);
    let sk = SymMatrix::symmetric_part(&Square::from_fn(n, |r, c| 0.5 * (full[(r, c)] + jaj[(r, c)])));
    let eig = sym_eigen(&sk).unwrap().eigenvalues;
    let mu: Vec<f64> = eig[..n / 2].to_vec();
    let half = 0.5 * a.trace();
    (0..1u32 << mu.len())
        .map(|mask| half + mu.iter().enumerate().map(|(k, m)| if mask >> k & 1 == 1 { -m } else { *m }).sum::<f64>())
        .product()
}

#[test]
fn every_operator_is_homogeneous() {
    for g in catalog() {
        let defect = g.homogeneity_defect(50, 3).unwrap();
        assert!(defect <= 1e-9, "{}: {defect:e}", g.name());
    }
}

#[test]
fn ma_lag_matches_mask_enumeration() {
    for i in 0..300u64 {
        let n = [2, 4, 6][(i % 3) as usize];
        let g = GardingOperator::ma_lag(n).unwrap();
        let a = random_symmetric_with::<f64, _>(n, &mut rng_for(21, i)).shift(1.0);
        let want = ma_lag_by_masks(&a);
        let got = g.evaluate(&a).unwrap();
        let scale = (1.0 + a.frobenius_norm()).powi(g.degree() as i32);
        assert!((got - want).abs() <= 1e-11 * scale, "n={n}: {got} vs {want}");
    }
}

#[test]
fn ma_lag_in_dimension_two_is_det() {
    let g = GardingOperator::ma_lag(2).unwrap();
    for i in 0..1000u64 {
        let a = random_symmetric_with::<f64, _>(2, &mut rng_for(22, i));
        let det = a.get(0, 0) * a.get(1, 1) - a.get(0, 1).powi(2);
        assert!((g.evaluate(&a).unwrap() - det).abs() <= 1e-13 * (1.0 + a.frobenius_norm().powi(2)));
    }
}

#[test]
fn ma_lag_at_identity() {
    for (n, want) in [(2, 1.0), (4, 16.0), (6, 3f64.powi(8)), (8, 4f64.powi(16))] {
        let got = GardingOperator::ma_lag(n).unwrap().evaluate(&SymMatrix::identity(n)).unwrap();
        assert!((got - want).abs() <= 1e-12 * want, "n={n}");
    }
}

#[test]
fn norm2_det_is_a_product() {
    let symbolic = GardingOperator::symbolic(3, frobenius_square_poly(3)).unwrap();
    let prod = GardingOperator::product(symbolic, GardingOperator::det(3).unwrap()).unwrap();
    let g = GardingOperator::norm2_det(3).unwrap();
    assert_eq!(g.degree(), prod.degree());
    for i in 0..100u64 {
        let a = random_symmetric_with::<f64, _>(3, &mut rng_for(23, i));
        let (x, y) = (g.evaluate(&a).unwrap(), prod.evaluate(&a).unwrap());
        assert!((x - y).abs() <= 1e-12 * (1.0 + a.frobenius_norm().powi(5)));
    }
}

#[test]
fn orthogonal_conjugation_leaves_spectral_operators_fixed() {
    for i in 0..30u64 {
        let mut rng = rng_for(24, i);
        let h: Square = random_orthogonal_with(4, &mut rng);
        for g in [GardingOperator::det(4).unwrap(), GardingOperator::sigma_k(4, 3).unwrap()] {
            let c = GardingOperator::conjugate(g.clone(), h.clone()).unwrap();
            let a = random_symmetric_with::<f64, _>(4, &mut rng);
            let (x, y) = (g.evaluate(&a).unwrap(), c.evaluate(&a).unwrap());
            assert!((x - y).abs() <= 1e-11 * (1.0 + a.frobenius_norm().powi(4)));
        }
    }
}

#[test]
fn radial_derivative_of_det_is_sigma_n_minus_one() {
    let n = 4;
    let d = GardingOperator::radial_derivative(GardingOperator::det(n).unwrap()).unwrap();
    assert_eq!(d.degree(), n - 1);
    for i in 0..100u64 {
        let a = random_symmetric_with::<f64, _>(n, &mut rng_for(25, i));
        let want = elementary_symmetric(&sym_eigen(&a).unwrap().eigenvalues, n - 1);
        let got = d.evaluate(&a).unwrap();
        assert!((got - want).abs() <= 1e-10 * (1.0 + a.frobenius_norm().powi(3)), "{got} vs {want}");
    }
}

#[test]
fn identity_transform_is_transparent() {
    let g = GardingOperator::sigma_k(3, 2).unwrap();
    let t = GardingOperator::linear_transform(g.clone(), LinearMap::identity(3)).unwrap();
    assert_eq!(t.flags(), g.flags());
    for i in 0..50u64 {
        let a = random_symmetric_with::<f64, _>(3, &mut rng_for(26, i));
        assert!((t.evaluate(&a).unwrap() - g.evaluate(&a).unwrap()).abs() <= 1e-13);
    }
}

#[test]
fn adjoint_is_adjoint() {
    let map = LinearMap::from_fn(3, |a| {
        let mut b = a.scale(2.0);
        b.set(0, 1, a.get(0, 1) + a.get(2, 2));
        b
    });
    let adj = map.adjoint();
    for i in 0..50u64 {
        let mut rng = rng_for(27, i);
        let a = random_symmetric_with::<f64, _>(3, &mut rng);
        let b = random_symmetric_with::<f64, _>(3, &mut rng);
        let (x, y) = (map.apply(&a).dot(&b), a.dot(&adj.apply(&b)));
        assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
    }
}
