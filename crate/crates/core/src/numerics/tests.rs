use super::*;
use crate::random;
use crate::scalar::{cplx, creal, czero, C};

fn c(re: f64, im: f64) -> C<f64> {
    cplx(re, im)
}

fn sigma_x() -> ComplexMatrix<f64> {
    ComplexMatrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]).unwrap()
}

fn sigma_z() -> ComplexMatrix<f64> {
    ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
}

fn check_eigensystem(a: &ComplexMatrix<f64>, eig: &HermitianEigensystem<f64>) {
    let n = a.dim();
    let residual = (a - &eig.reconstruct()).frobenius_norm();
    assert!(
        residual <= 1e-10 * a.frobenius_norm().max(1e-300),
        "residual {residual:e}"
    );
    let vv = eig.eigenvectors.adjoint().matmul(&eig.eigenvectors);
    assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
    assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    let tr: f64 = eig.eigenvalues.iter().sum();
    assert!((tr - a.trace().re).abs() < 1e-10 * (1.0 + a.frobenius_norm()));
}

#[test]
fn pauli_z_spectrum() {
    let eig = hermitian_eig(&sigma_z()).unwrap();
    assert_eq!(eig.eigenvalues, vec![-1.0, 1.0]);
    check_eigensystem(&sigma_z(), &eig);
}

#[test]
fn pauli_x_spectrum_and_vectors() {
    let eig = hermitian_eig(&sigma_x()).unwrap();
    assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
    assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let minus = [c(s, 0.), c(-s, 0.)];
    let plus = [c(s, 0.), c(s, 0.)];
    for (k, target) in [(0, minus), (1, plus)] {
        let v = eig.eigenvector(k);
        let overlap: C<f64> = target.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        assert!(
            (overlap.norm() - 1.0).abs() < 1e-12,
            "eigenvector {k} off by more than a phase"
        );
    }
    check_eigensystem(&sigma_x(), &eig);
}

#[test]
fn random_hermitian_16_reconstructs() {
    let mut rng = random::rng(16);
    let a = random::hermitian::<f64, _>(&mut rng, 16);
    let eig = hermitian_eig(&a).unwrap();
    check_eigensystem(&a, &eig);
}

#[test]
fn degenerate_and_zero_matrices() {
    let z = ComplexMatrix::<f64>::zeros(4);
    let eig = hermitian_eig(&z).unwrap();
    assert_eq!(eig.eigenvalues, vec![0.0; 4]);
    let i = ComplexMatrix::<f64>::identity(5).scale_real(3.0);
    let eig = hermitian_eig(&i).unwrap();
    assert!(eig.eigenvalues.iter().all(|&l| (l - 3.0).abs() < 1e-15));
    // Rank-one perturbation of a large degenerate cluster.
    let mut v = vec![czero(); 8];
    v[0] = creal(0.6);
    v[7] = c(0.0, 0.8);
    let a = &ComplexMatrix::identity(8).scale_real(0.1) + &ComplexMatrix::projector(&v);
    let eig = hermitian_eig(&a).unwrap();
    check_eigensystem(&a, &eig);
    assert!((eig.max_eigenvalue() - 1.1).abs() < 1e-12);
}

#[test]
fn non_hermitian_is_rejected() {
    let a = ComplexMatrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(0., 0.), c(0., 0.)]]).unwrap();
    assert!(matches!(hermitian_eig(&a), Err(NumericsError::NotHermitian { .. })));
}

#[test]
fn single_precision_eigensolver() {
    let mut rng = random::rng(3);
    let a = random::hermitian::<f32, _>(&mut rng, 8);
    let eig = hermitian_eig(&a).unwrap();
    let residual = (&a - &eig.reconstruct()).frobenius_norm();
    assert!(residual < 1e-4 * a.frobenius_norm());
}

#[test]
fn tensor_examples() {
    let i2 = ComplexMatrix::<f64>::identity(2);
    assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
    let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
    let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
    assert_eq!(
        tensor(&p0, &p1),
        ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0, 0.0])
    );
}

#[test]
fn tensor_mixed_product_against_direct_multiplication() {
    let mut rng = random::rng(7);
    let [a, b, cc, d]: [ComplexMatrix<f64>; 4] = std::array::from_fn(|_| random::ginibre(&mut rng, 2));
    let lhs = tensor(&a, &b).matmul(&tensor(&cc, &d));
    // Entry-by-entry oracle for (AC ⊗ BD).
    let ac = a.matmul(&cc);
    let bd = b.matmul(&d);
    let oracle = ComplexMatrix::from_fn(4, |i, j| ac[(i / 2, j / 2)] * bd[(i % 2, j % 2)]);
    assert!(lhs.max_abs_diff(&oracle) < 1e-12);
}

#[test]
fn tensor_is_associative() {
    use rand::Rng;
    let mut rng = random::rng(11);
    // Gaussian-integer entries: every product is exact, so associativity is exact.
    let mut int_matrix =
        || ComplexMatrix::from_fn(2, |_, _| c(rng.gen_range(-9..=9) as f64, rng.gen_range(-9..=9) as f64));
    let [a, b, cc] = [int_matrix(), int_matrix(), int_matrix()];
    let left = tensor(&tensor(&a, &b), &cc);
    let right = tensor(&a, &tensor(&b, &cc));
    assert_eq!(left.max_abs_diff(&right), 0.0);

    let [a, b, cc]: [ComplexMatrix<f64>; 3] = std::array::from_fn(|_| random::ginibre(&mut rng, 2));
    let left = tensor(&tensor(&a, &b), &cc);
    let right = tensor(&a, &tensor(&b, &cc));
    assert!(left.max_abs_diff(&right) < 1e-14);
}

#[test]
fn partial_trace_of_bell_pair_is_maximally_mixed() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = ComplexMatrix::projector(&[creal(s), czero(), czero(), creal(s)]);
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    for keep in [[0usize], [1usize]] {
        let r = partial_trace(&bell, &[2, 2], &keep).unwrap();
        assert!(r.max_abs_diff(&half) < 1e-15);
    }
}

#[test]
fn partial_trace_of_product_state() {
    let mut rng = random::rng(21);
    let rho = random::density::<f64, _>(&mut rng, 2);
    let sigma = random::density::<f64, _>(&mut rng, 4);
    let joint = tensor(&rho, &sigma);
    let r = partial_trace(&joint, &[2, 4], &[0]).unwrap();
    assert!(r.max_abs_diff(&rho) < 1e-12);
    let s = partial_trace(&joint, &[2, 4], &[1]).unwrap();
    assert!(s.max_abs_diff(&sigma) < 1e-12);
    let scalar = partial_trace(&joint, &[2, 4], &[]).unwrap();
    assert!((scalar[(0, 0)] - creal(1.0)).norm() < 1e-12);
}

#[test]
fn partial_trace_keeps_middle_subsystem() {
    let mut rng = random::rng(5);
    let [a, b, cc]: [ComplexMatrix<f64>; 3] = std::array::from_fn(|_| random::density(&mut rng, 2));
    let joint = tensor_all(&[a, b.clone(), cc]);
    let r = partial_trace(&joint, &[2, 2, 2], &[1]).unwrap();
    assert!(r.max_abs_diff(&b) < 1e-12);
}

#[test]
fn partial_trace_errors() {
    let a = ComplexMatrix::<f64>::identity(4);
    assert!(matches!(
        partial_trace(&a, &[2, 3], &[0]),
        Err(NumericsError::DimMismatch { .. })
    ));
    assert!(matches!(
        partial_trace(&a, &[2, 2], &[2]),
        Err(NumericsError::BadSubsystems { .. })
    ));
}

#[test]
fn unitary_examples() {
    let h = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
    let phi: f64 = 0.7;
    let u = unitary_from_generator(&h, phi, Sign::Plus).unwrap();
    let expected =
        ComplexMatrix::from_rows(vec![vec![creal(1.0), czero()], vec![czero(), c(phi.cos(), phi.sin())]]).unwrap();
    assert!(u.max_abs_diff(&expected) < 1e-15);
    let id = unitary_from_generator(&h, 0.0, Sign::Plus).unwrap();
    assert!(id.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
}

#[test]
fn unitary_group_property_and_unitarity() {
    let mut rng = random::rng(99);
    let h = random::hermitian::<f64, _>(&mut rng, 4);
    for (p1, p2) in [(0.3, 1.1), (-0.8, 2.5), (0.7, 0.7)] {
        let u1 = unitary_from_generator(&h, p1, Sign::Plus).unwrap();
        let u2 = unitary_from_generator(&h, p2, Sign::Plus).unwrap();
        let u12 = unitary_from_generator(&h, p1 + p2, Sign::Plus).unwrap();
        assert!(u1.matmul(&u2).max_abs_diff(&u12) < 1e-10);
        assert!(u1.matmul(&u1.adjoint()).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
        let um = unitary_from_generator(&h, p1, Sign::Minus).unwrap();
        assert!(um.max_abs_diff(&u1.adjoint()) < 1e-10);
    }
}

#[test]
fn conjugation_preserves_trace_and_spectrum() {
    let mut rng = random::rng(123);
    let h = random::hermitian::<f64, _>(&mut rng, 4);
    let a = random::hermitian::<f64, _>(&mut rng, 4);
    let u = unitary_from_generator(&h, 0.9, Sign::Plus).unwrap();
    let b = a.conjugate_by(&u);
    assert!((a.trace() - b.trace()).norm() < 1e-10);
    let ea = hermitian_eig(&a).unwrap().eigenvalues;
    let eb = hermitian_eig(&b.hermitian_part()).unwrap().eigenvalues;
    for (x, y) in ea.iter().zip(&eb) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn psd_sqrt_examples() {
    let i = ComplexMatrix::<f64>::identity(3);
    assert!(psd_sqrt(&i).unwrap().max_abs_diff(&i) < 1e-15);
    let d = ComplexMatrix::from_real_diagonal(&[4.0, 9.0]);
    let r = psd_sqrt(&d).unwrap();
    assert!(r.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[2.0, 3.0])) < 1e-14);
    let mut rng = random::rng(4);
    let a = random::density::<f64, _>(&mut rng, 6);
    let s = psd_sqrt(&a).unwrap();
    assert!(s.matmul(&s).max_abs_diff(&a) < 1e-9);
    assert!(hermitian_eig(&s).unwrap().min_eigenvalue() > -1e-12);
}

#[test]
fn psd_sqrt_rejects_indefinite() {
    assert!(matches!(psd_sqrt(&sigma_z()), Err(NumericsError::NotPsd { .. })));
}

#[test]
fn constructors_validate() {
    assert!(matches!(
        ComplexMatrix::<f64>::from_entries(2, vec![czero(); 3]),
        Err(NumericsError::BadShape { .. })
    ));
    assert!(matches!(
        ComplexMatrix::<f64>::from_entries(1, vec![c(f64::NAN, 0.0)]),
        Err(NumericsError::NonFinite)
    ));
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..9) {
            let mut rng = random::rng(seed);
            let a = random::hermitian::<f64, _>(&mut rng, dim);
            let eig = hermitian_eig(&a).unwrap();
            check_eigensystem(&a, &eig);
        }

        #[test]
        fn partial_trace_preserves_trace(seed in any::<u64>(), keep_first in any::<bool>()) {
            let mut rng = random::rng(seed);
            let a = random::density::<f64, _>(&mut rng, 8);
            let keep: &[usize] = if keep_first { &[0] } else { &[1, 2] };
            let r = partial_trace(&a, &[2, 2, 2], keep).unwrap();
            prop_assert!((r.trace() - a.trace()).norm() < 1e-12);
        }
    }
}
