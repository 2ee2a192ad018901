use super::*;
use crate::numerics::tensor;
use crate::random;

const PHI: f64 = 0.7;

fn assert_density(rho: &DensityMatrix<f64>) {
    let m = rho.matrix();
    assert!(m.is_hermitian(1e-12));
    assert!((m.trace().re - 1.0).abs() < 1e-10);
    assert!(rho.eigensystem().unwrap().min_eigenvalue() > -1e-10);
    assert!(DensityMatrix::new(m.clone()).is_ok());
}

fn sorted_eigenvalues(rho: &DensityMatrix<f64>) -> Vec<f64> {
    rho.eigensystem().unwrap().eigenvalues
}

#[test]
fn nghz_examples() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = ComplexMatrix::projector(&[creal(s), creal(s)]);
    assert!(nghz::<f64>(1).unwrap().matrix().max_abs_diff(&plus) < 1e-15);

    let bell = ComplexMatrix::projector(&[creal(s), czero(), czero(), creal(s)]);
    assert!(nghz::<f64>(2).unwrap().matrix().max_abs_diff(&bell) < 1e-15);
    assert_eq!(bell00::<f64>(), nghz(2).unwrap());

    let g3 = nghz::<f64>(3).unwrap();
    assert!((g3.matrix()[(0, 7)] - creal(0.5)).norm() < 1e-15);
    for n in 1..=6 {
        let g = nghz::<f64>(n).unwrap();
        assert!((g.purity() - 1.0).abs() < 1e-10);
        let eig = sorted_eigenvalues(&g);
        assert_eq!(eig.iter().filter(|l| l.abs() > 1e-10).count(), 1, "rank one");
        assert_density(&g);
    }
    assert_eq!(nghz::<f64>(0), Err(ProbeError::InvalidQubitCount(0)));
}

#[test]
fn werner_examples() {
    for n in 1..=4 {
        let w = werner(&WernerSpec::new(n, 0.0).unwrap()).unwrap();
        let mixed = ComplexMatrix::identity(1 << n).scale_real(1.0 / (1 << n) as f64);
        assert!(w.matrix().max_abs_diff(&mixed) < 1e-15);
    }
    let w1 = werner(&WernerSpec::new(2, 1.0).unwrap()).unwrap();
    assert!(w1.matrix().max_abs_diff(bell00::<f64>().matrix()) < 1e-15);

    // Eigenvalues η + (1−η)/2^N once and (1−η)/2^N otherwise.
    let w = werner(&WernerSpec::new(2, 0.5).unwrap()).unwrap();
    let eig = sorted_eigenvalues(&w);
    let expected = [0.125, 0.125, 0.125, 0.625];
    for (a, b) in eig.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
    for n in 1..=5 {
        for eta in [0.1, 0.5, 0.9] {
            let w = werner(&WernerSpec::new(n, eta).unwrap()).unwrap();
            assert_density(&w);
            let eig = sorted_eigenvalues(&w);
            assert!(eig.iter().all(|&l| l > 1e-12), "full rank for 0<η<1");
        }
    }
    assert_eq!(WernerSpec::new(2, 1.5), Err(ProbeError::InvalidEta(1.5)));
    assert_eq!(WernerSpec::new(0, 0.5), Err(ProbeError::InvalidQubitCount(0)));
}

#[test]
fn werner_single_qubit_marginals_are_maximally_mixed() {
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    for n in 2..=6 {
        for eta in [0.0, 0.3, 0.8, 1.0] {
            let fam = ProbeFamily::collective(werner(&WernerSpec::new(n, eta).unwrap()).unwrap());
            let rho = encode(&fam, PHI);
            for q in 0..n {
                let r = rho.reduced(&[q]).unwrap();
                assert!(r.matrix().max_abs_diff(&half) < 1e-12, "n={n} eta={eta} qubit {q}");
            }
        }
    }
}

#[test]
fn classical_table_examples() {
    let t = ClassicalTable::new(2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    let rho = classically_correlated(&t);
    assert!(
        rho.matrix()
            .max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]))
            < 1e-15
    );

    let (qa, qb) = ([0.3, 0.7], [0.6, 0.4]);
    let probs = vec![qa[0] * qb[0], qa[0] * qb[1], qa[1] * qb[0], qa[1] * qb[1]];
    let rho = classically_correlated(&ClassicalTable::new(2, probs).unwrap());
    let product = tensor(
        &ComplexMatrix::from_real_diagonal(&qa),
        &ComplexMatrix::from_real_diagonal(&qb),
    );
    assert!(rho.matrix().max_abs_diff(&product) < 1e-15);
}

#[test]
fn classical_state_is_fixed_point_of_product_dephasing() {
    let mut rng = random::rng(2024);
    for _ in 0..10 {
        let probs = random::probability_vector::<f64, _>(&mut rng, 4);
        let bases = vec![random::unitary(&mut rng, 2), random::unitary(&mut rng, 2)];
        let table = ClassicalTable::with_local_bases(2, probs, bases.clone()).unwrap();
        let rho = classically_correlated(&table);
        assert_density(&rho);

        // Oracle: apply Σ_{ab} P_ab ρ P_ab with explicitly built projectors.
        let mut dephased = ComplexMatrix::zeros(4);
        for a in 0..2 {
            for b in 0..2 {
                let ket = crate::numerics::tensor_vec(&bases[0].column(a), &bases[1].column(b));
                let p = ComplexMatrix::projector(&ket);
                dephased += &p.matmul(rho.matrix()).matmul(&p);
            }
        }
        assert!(dephased.max_abs_diff(rho.matrix()) < 1e-12);
        let via_lib = dephase_in_product_basis(rho.matrix(), &table.product_basis());
        assert!(via_lib.max_abs_diff(rho.matrix()) < 1e-12);
    }
}

#[test]
fn classical_table_rejects_bad_input() {
    assert!(matches!(
        ClassicalTable::new(2, vec![0.5, 0.5]),
        Err(ProbeError::BadTable(_))
    ));
    assert!(matches!(
        ClassicalTable::new(1, vec![0.7, 0.7]),
        Err(ProbeError::BadTable(_))
    ));
    assert!(matches!(
        ClassicalTable::new(1, vec![1.2, -0.2]),
        Err(ProbeError::BadTable(_))
    ));
    let not_unitary = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
    assert!(matches!(
        ClassicalTable::with_local_bases(1, vec![0.5, 0.5], vec![not_unitary]),
        Err(ProbeError::BadTable(_))
    ));
}

#[test]
fn density_matrix_validation() {
    assert!(DensityMatrix::new(ComplexMatrix::<f64>::identity(3).scale_real(1.0 / 3.0)).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::<f64>::identity(2)).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.5, -0.5])).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.25, 0.75])).is_ok());
}

#[test]
fn encode_at_zero_is_identity_map() {
    let fam = ProbeFamily::collective(werner(&WernerSpec::new(3, 0.4).unwrap()).unwrap());
    assert_eq!(&encode(&fam, 0.0), fam.initial());
}

#[test]
fn encoded_nghz_coherence() {
    for n in 1..=6 {
        let fam = ProbeFamily::collective(nghz::<f64>(n).unwrap());
        let rho = encode(&fam, PHI);
        let dim = 1 << n;
        let expected = cis(-(n as f64) * PHI) * 0.5;
        assert!((rho.matrix()[(0, dim - 1)] - expected).norm() < 1e-14, "n={n}");
    }
}

#[test]
fn encoding_preserves_spectrum_and_inverts() {
    let mut rng = random::rng(77);
    let families = [
        ProbeFamily::collective(werner(&WernerSpec::new(3, 0.6).unwrap()).unwrap()),
        ProbeFamily::new(
            DensityMatrix::new(random::density(&mut rng, 4)).unwrap(),
            random::hermitian(&mut rng, 4),
            Sign::Minus,
        )
        .unwrap(),
    ];
    for fam in &families {
        let base = sorted_eigenvalues(fam.initial());
        for phi in [0.3, 0.7, 1.4, -2.0] {
            let rho = encode(fam, phi);
            assert_density(&rho);
            for (a, b) in sorted_eigenvalues(&rho).iter().zip(&base) {
                assert!((a - b).abs() < 1e-10);
            }
            let back = ProbeFamily::new(rho.clone(), fam.generator().clone(), fam.sign()).unwrap();
            assert!(encode(&back, -phi).matrix().max_abs_diff(fam.initial().matrix()) < 1e-10);
        }
    }
}

#[test]
fn diagonal_fast_path_matches_dense_unitary() {
    let fam = ProbeFamily::collective(werner(&WernerSpec::new(3, 0.7).unwrap()).unwrap());
    let dense =
        fam.initial()
            .matrix()
            .conjugate_by(&unitary_from_eigensystem(fam.generator_spectrum(), PHI, Sign::Plus));
    assert!(encode(&fam, PHI).matrix().max_abs_diff(&dense) < 1e-14);
}

#[test]
fn derivative_vanishes_when_generator_commutes() {
    for n in 1..=4 {
        let fam = ProbeFamily::collective(werner(&WernerSpec::new(n, 0.0).unwrap()).unwrap());
        assert!(d_rho_d_phi(&fam, PHI).frobenius_norm() == 0.0);
    }
}

#[test]
fn bell_derivative_at_zero() {
    let eta = 0.6;
    let fam = ProbeFamily::collective(werner(&WernerSpec::new(2, eta).unwrap()).unwrap());
    let d = d_rho_d_phi(&fam, 0.0);
    // ρ_φ(00,11) = (η/2) e^{−2iφ}, so its derivative at 0 is −iη; (11,00) carries +iη.
    assert!((d[(0, 3)] - cplx(0.0, -eta)).norm() < 1e-15);
    assert!((d[(3, 0)] - cplx(0.0, eta)).norm() < 1e-15);
}

fn finite_difference(fam: &ProbeFamily<f64>, phi: f64) -> ComplexMatrix<f64> {
    let h = 1e-6;
    let plus = encode(fam, phi + h);
    let minus = encode(fam, phi - h);
    (plus.matrix() - minus.matrix()).scale_real(0.5 / h)
}

#[test]
fn derivative_matches_central_differences() {
    let mut rng = random::rng(8);
    let table = ClassicalTable::with_local_bases(
        2,
        random::probability_vector(&mut rng, 4),
        vec![random::unitary(&mut rng, 2), random::unitary(&mut rng, 2)],
    )
    .unwrap();
    let families = vec![
        ProbeFamily::collective(werner(&WernerSpec::new(2, 0.5).unwrap()).unwrap()),
        ProbeFamily::collective(werner(&WernerSpec::new(4, 0.9).unwrap()).unwrap()).with_sign(Sign::Minus),
        ProbeFamily::collective(nghz(3).unwrap()),
        ProbeFamily::collective(classically_correlated(&table)),
        ProbeFamily::new(
            DensityMatrix::new(random::density(&mut rng, 4)).unwrap(),
            random::hermitian(&mut rng, 4),
            Sign::Plus,
        )
        .unwrap(),
    ];
    for fam in &families {
        for phi in [0.0, 0.3, 1.1] {
            let analytic = d_rho_d_phi(fam, phi);
            let fd = finite_difference(fam, phi);
            let scale = analytic.frobenius_norm();
            assert!(scale > 0.0);
            for i in 0..analytic.dim() {
                for j in 0..analytic.dim() {
                    let a = analytic[(i, j)];
                    let err = (fd[(i, j)] - a).norm();
                    assert!(err <= 1e-6 * a.norm().max(1e-3 * scale), "entry ({i},{j}) err {err:e}");
                }
            }
            assert!(analytic.is_hermitian(1e-10));
            assert!(analytic.trace().norm() < 1e-10);
        }
    }
}

#[test]
fn descriptor_round_trip_and_construction() {
    let text = r#"{"kind": "werner", "n": 3, "eta": 0.5}"#;
    let d = StateDescriptor::from_json(text).unwrap();
    assert_eq!(d, StateDescriptor::werner(3, 0.5));
    assert_eq!(StateDescriptor::from_json(&d.to_json()).unwrap(), d);
    let fam = d.family::<f64>().unwrap();
    assert_eq!(fam.qubits(), 3);

    let bell = StateDescriptor::from_json(r#"{"kind": "bell", "sign": -1}"#).unwrap();
    assert_eq!(bell.sign, Sign::Minus);
    assert_eq!(bell.state::<f64>().unwrap(), bell00());

    let raw = r#"{"kind": "raw-matrix", "entries": [[[0.5, 0], [0, 0.5]], [[0, -0.5], [0.5, 0]]],
                  "generator": {"raw": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}}"#;
    let d = StateDescriptor::from_json(raw).unwrap();
    let fam = d.family::<f64>().unwrap();
    assert!((fam.initial().purity() - 1.0).abs() < 1e-12);

    let classical = r#"{"kind": "classical", "n": 2, "table": [0.5, 0, 0, 0.5]}"#;
    assert_eq!(StateDescriptor::from_json(classical).unwrap().kind_name(), "classical");

    assert!(StateDescriptor::from_json(r#"{"kind": "qutrit"}"#).is_err());
    assert!(StateDescriptor::from_json(r#"{"kind": "werner", "n": 2, "eta": 2.0}"#)
        .unwrap()
        .state::<f64>()
        .is_err());
    assert!(StateDescriptor::from_json(r#"{"kind": "bell", "sign": 2}"#).is_err());
}

#[test]
fn single_precision_family() {
    let fam = ProbeFamily::collective(werner(&WernerSpec::new(3, 0.5f32).unwrap()).unwrap());
    let rho = encode(&fam, 0.7f32);
    assert!((rho.matrix().trace().re - 1.0).abs() < 1e-5);
    let d = d_rho_d_phi(&fam, 0.7f32);
    assert!(d.trace().norm() < 1e-6);
}
