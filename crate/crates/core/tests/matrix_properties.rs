use garding_core::matrix::{complex_structure, skew_hermitian_part, sym_eigen, Square, SymMatrix};
use garding_core::sampling::{random_orthogonal_with, random_spd, random_symmetric_with, rng_for};

#[test]
fn reconstruction_over_a_thousand_matrices() {
    for i in 0..1000u64 {
        let n = 1 + (i % 6) as usize;
        let a = random_symmetric_with::<f64, _>(n, &mut rng_for(11, i)).scale(1.0 + (i % 7) as f64);
        let eig = sym_eigen(&a).unwrap();
        let err = eig.reconstruct().sub(&a).frobenius_norm();
        assert!(err <= 1e-10 * (1.0 + a.frobenius_norm()), "n={n} err={err:e}");
        assert!(eig.basis.orthogonality_defect() <= 1e-12);
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn eigen_examples() {
    let eig = sym_eigen(&SymMatrix::<f64>::diagonal(&[1.0, 2.0, 3.0])).unwrap();
    assert_eq!(eig.eigenvalues, vec![3.0, 2.0, 1.0]);
    let swap = SymMatrix::<f64>::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1e-12).unwrap();
    let eig = sym_eigen(&swap).unwrap();
    assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-15 && (eig.eigenvalues[1] + 1.0).abs() < 1e-15);
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let v0 = eig.basis.column(0);
    assert!((v0[0].abs() - c).abs() < 1e-14 && (v0[0] - v0[1]).abs() < 1e-14);
}

#[test]
fn similarity_preserves_spectrum() {
    for i in 0..50u64 {
        let mut rng = rng_for(12, i);
        let q: Square = random_orthogonal_with(4, &mut rng);
        let a = random_symmetric_with::<f64, _>(4, &mut rng);
        let x = sym_eigen(&a).unwrap().eigenvalues;
        let y = sym_eigen(&a.congruence(&q)).unwrap().eigenvalues;
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() <= 1e-9);
        }
    }
}

#[test]
fn sampled_spd_is_positive() {
    for seed in 0..200 {
        let a = random_spd::<f64>(5, seed, 3.0);
        assert!(sym_eigen(&a).unwrap().min_eigenvalue() > 0.0);
    }
}

#[test]
fn skew_part_anticommutes_with_j() {
    for i in 0..100u64 {
        let n = 2 * (1 + (i % 4) as usize);
        let a = random_symmetric_with::<f64, _>(n, &mut rng_for(13, i));
        let (sk, mu) = skew_hermitian_part(&a).unwrap();
        let j = complex_structure::<f64>(n).unwrap();
        let s = sk.to_square();
        let (sj, js) = (s.mul(&j), j.mul(&s));
        for r in 0..n {
            for c in 0..n {
                assert!((sj[(r, c)] + js[(r, c)]).abs() <= 1e-12);
            }
        }
        // ± pairing of the spectrum
        let eig = sym_eigen(&sk).unwrap().eigenvalues;
        for k in 0..n / 2 {
            assert!((eig[k] + eig[n - 1 - k]).abs() <= 1e-10);
            assert!((eig[k] - mu[k]).abs() <= 1e-10);
        }
    }
}

#[test]
fn skew_part_examples() {
    let (sk, mu) = skew_hermitian_part(&SymMatrix::<f64>::identity(2)).unwrap();
    assert_eq!(sk.frobenius_norm(), 0.0);
    assert_eq!(mu, vec![0.0]);
    let (a, b, c) = (3.0, -1.5, 0.25);
    let m = SymMatrix::<f64>::from_rows(&[vec![a, b], vec![b, c]], 1e-12).unwrap();
    let (_, mu) = skew_hermitian_part(&m).unwrap();
    assert!((mu[0] - (((a - c) / 2.0f64).powi(2) + b * b).sqrt()).abs() < 1e-14);
    assert!(skew_hermitian_part(&SymMatrix::<f64>::identity(3)).is_err());
}

#[test]
fn single_precision_layer() {
    let a = SymMatrix::<f32>::diagonal(&[1.0, 2.0, 3.0]);
    let eig = sym_eigen(&a).unwrap();
    assert_eq!(eig.eigenvalues, vec![3.0f32, 2.0, 1.0]);
    let b = random_symmetric_with::<f64, _>(4, &mut rng_for(1, 1));
    let eig32 = sym_eigen(&b.cast::<f32>()).unwrap();
    let eig64 = sym_eigen(&b).unwrap();
    for (x, y) in eig32.eigenvalues.iter().zip(&eig64.eigenvalues) {
        assert!((*x as f64 - y).abs() < 1e-5);
    }
}
