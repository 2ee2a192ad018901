use super::*;
use crate::numerics::Sign;
use crate::probes::{
    classically_correlated, encode, nghz, werner, ClassicalTable, DensityMatrix, ProbeFamily, WernerSpec,
};
use crate::random;
use crate::readout::Povm;
use crate::scalar::C;

const PHI: f64 = 0.7;

fn werner_family(n: usize, eta: f64) -> ProbeFamily<f64> {
    ProbeFamily::collective(werner(&WernerSpec::new(n, eta).unwrap()).unwrap())
}

fn eq10(eta: f64) -> f64 {
    8.0 * eta * eta / (1.0 + eta)
}

fn eq12(n: usize, eta: f64) -> f64 {
    let d = (1u64 << n) as f64;
    d / (d * eta + 2.0 * (1.0 - eta)) * (n * n) as f64 * eta * eta
}

#[test]
fn classical_fisher_without_dependence_is_zero() {
    let d = OutcomeDistribution::single_part(vec![0.2, 0.3, 0.5], vec![0.0; 3]).unwrap();
    assert_eq!(classical_fisher(&d).unwrap(), 0.0);
}

#[test]
fn single_qubit_interferometry_gives_four() {
    for phi in [0.3, PHI, 1.2] {
        let c = (2.0 * phi).cos();
        let s = (2.0 * phi).sin();
        let d = OutcomeDistribution::single_part(vec![(1.0 + c) / 2.0, (1.0 - c) / 2.0], vec![-s, s]).unwrap();
        assert!((classical_fisher(&d).unwrap() - 4.0).abs() < 1e-12);
    }
}

#[test]
fn zero_probability_outcomes() {
    let d = OutcomeDistribution::<f64>::single_part(vec![0.5, 0.5, 0.0], vec![0.25, -0.25, 0.0]).unwrap();
    assert!((classical_fisher(&d).unwrap() - 0.25).abs() < 1e-15);
    let d = OutcomeDistribution::single_part(vec![0.5, 0.5, 0.0], vec![0.5, -1.0, 0.5]).unwrap();
    assert!(matches!(classical_fisher(&d), Err(FisherError::SingularFisher { .. })));
}

#[test]
fn distribution_validation() {
    assert!(OutcomeDistribution::single_part(vec![0.5, 0.6], vec![0.0, 0.0]).is_err());
    assert!(OutcomeDistribution::single_part(vec![0.5, 0.5], vec![0.1, 0.0]).is_err());
    assert!(OutcomeDistribution::single_part(vec![1.1, -0.1], vec![0.0, 0.0]).is_err());
    assert!(OutcomeDistribution::new(vec![vec![0], vec![0]], vec![0.5, 0.5], vec![0.0, 0.0]).is_err());
    assert!(OutcomeDistribution::new(vec![vec![0], vec![0, 1]], vec![0.5, 0.5], vec![0.0, 0.0]).is_err());
}

#[test]
fn werner_coherent_optimal_distribution() {
    for eta in [0.1, 0.5, 0.9] {
        let fam = werner_family(2, eta);
        let povm = sld_povm(&sld(&fam, PHI).unwrap()).unwrap();
        let rho = encode(&fam, PHI);
        let drho = crate::probes::d_rho_d_phi(&fam, PHI);
        let dist = crate::readout::outcome_distribution(&rho, &drho, &povm).unwrap();
        assert!((classical_fisher(&dist).unwrap() - eq10(eta)).abs() < 1e-9);
    }
}

/// Brute-force conditional Fisher sums over an explicit `a × b × c` grid.
fn three_part_oracle(p: &[f64], dp: &[f64], sizes: [usize; 3]) -> (f64, f64, f64) {
    let [na, nb, nc] = sizes;
    let idx = |a: usize, b: usize, c: usize| (a * nb + b) * nc + c;
    let mut pc = vec![0.0; nc];
    let mut dpc = vec![0.0; nc];
    let mut pbc = vec![vec![0.0; nc]; nb];
    let mut dpbc = vec![vec![0.0; nc]; nb];
    for a in 0..na {
        for b in 0..nb {
            for c in 0..nc {
                pc[c] += p[idx(a, b, c)];
                dpc[c] += dp[idx(a, b, c)];
                pbc[b][c] += p[idx(a, b, c)];
                dpbc[b][c] += dp[idx(a, b, c)];
            }
        }
    }
    let f_c: f64 = (0..nc).map(|c| dpc[c] * dpc[c] / pc[c]).sum();
    let mut f_b_c = 0.0;
    for c in 0..nc {
        for b in 0..nb {
            let q = pbc[b][c] / pc[c];
            let dq = (dpbc[b][c] * pc[c] - pbc[b][c] * dpc[c]) / (pc[c] * pc[c]);
            f_b_c += pc[c] * dq * dq / q;
        }
    }
    let mut f_a_bc = 0.0;
    for b in 0..nb {
        for c in 0..nc {
            for a in 0..na {
                let q = p[idx(a, b, c)] / pbc[b][c];
                let dq = (dp[idx(a, b, c)] * pbc[b][c] - p[idx(a, b, c)] * dpbc[b][c]) / (pbc[b][c] * pbc[b][c]);
                f_a_bc += pbc[b][c] * dq * dq / q;
            }
        }
    }
    (f_c, f_b_c, f_a_bc)
}

#[test]
fn chain_rule_product_distribution() {
    let (pa, dpa): (Vec<f64>, Vec<f64>) = (vec![0.3, 0.7], vec![0.2, -0.2]);
    let pb = [0.6, 0.4];
    let mut p = vec![];
    let mut dp = vec![];
    for a in 0..2 {
        for q in pb {
            p.push(pa[a] * q);
            dp.push(dpa[a] * q);
        }
    }
    let d = OutcomeDistribution::from_grid(&[2, 2], p, dp).unwrap();
    let terms = chain_decompose(&d, &[0, 1]).unwrap();
    let fa = 0.04 / 0.3 + 0.04 / 0.7;
    assert_eq!(terms[0].label, "F(X2)");
    assert_eq!(terms[1].label, "F(X1|X2)");
    assert!(terms[0].value.abs() < 1e-15);
    assert!((terms[1].value - fa).abs() < 1e-12);
}

#[test]
fn chain_rule_two_parts() {
    let mut rng = random::rng(55);
    for _ in 0..20 {
        let (p, dp) = random::parameterized_distribution::<f64, _>(&mut rng, 6, PHI);
        let d = OutcomeDistribution::from_grid(&[2, 3], p, dp).unwrap();
        let joint = classical_fisher(&d).unwrap();
        for order in [[0, 1], [1, 0]] {
            let sum: f64 = chain_decompose(&d, &order).unwrap().iter().map(|t| t.value).sum();
            assert!((sum - joint).abs() < 1e-9);
        }
    }
}

#[test]
fn chain_rule_three_parts_matches_brute_force() {
    let mut rng = random::rng(56);
    for _ in 0..20 {
        let sizes = [2, 3, 2];
        let (p, dp) = random::parameterized_distribution::<f64, _>(&mut rng, 12, PHI);
        let (f_c, f_b_c, f_a_bc) = three_part_oracle(&p, &dp, sizes);
        let d = OutcomeDistribution::from_grid(&sizes, p, dp).unwrap();
        let terms = chain_decompose(&d, &[0, 1, 2]).unwrap();
        assert!((terms[0].value - f_c).abs() < 1e-9);
        assert!((terms[1].value - f_b_c).abs() < 1e-9);
        assert!((terms[2].value - f_a_bc).abs() < 1e-9);
        assert_eq!(terms[2].label, "F(X1|X2,X3)");
        assert!((f_c + f_b_c + f_a_bc - classical_fisher(&d).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn chain_decompose_errors() {
    let d = OutcomeDistribution::single_part(vec![0.5, 0.5], vec![0.0, 0.0]).unwrap();
    assert!(matches!(
        chain_decompose(&d, &[0]),
        Err(FisherError::PartitionMismatch(_))
    ));
    let d = OutcomeDistribution::from_grid(&[2, 2], vec![0.25; 4], vec![0.0; 4]).unwrap();
    assert!(matches!(
        chain_decompose(&d, &[0, 0]),
        Err(FisherError::PartitionMismatch(_))
    ));
    assert!(matches!(
        chain_decompose(&d, &[0, 1, 2]),
        Err(FisherError::PartitionMismatch(_))
    ));
}

#[test]
fn qfi_heisenberg_limit_and_werner_forms() {
    for n in 1..=6 {
        let f = qfi(&ProbeFamily::collective(nghz(n).unwrap()), PHI).unwrap();
        assert!((f - (n * n) as f64).abs() < 1e-9, "n={n}: {f}");
    }
    for eta in [0.0, 0.1, 0.5, 0.9, 1.0] {
        assert!((qfi(&werner_family(2, eta), PHI).unwrap() - eq10(eta)).abs() < 1e-9);
        for n in 2..=5 {
            assert!((qfi(&werner_family(n, eta), PHI).unwrap() - eq12(n, eta)).abs() < 1e-9);
        }
    }
}

#[test]
fn pure_state_qfi_is_four_times_variance() {
    for n in 1..=6 {
        let fam = ProbeFamily::collective(nghz(n).unwrap());
        let psi = crate::probes::ghz_vector::<f64>(n);
        let h = fam.generator();
        let hpsi = h.apply(&psi);
        let mean: C<f64> = psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
        let second: f64 = hpsi.iter().map(|z| z.norm_sqr()).sum();
        let var = second - mean.re * mean.re;
        assert!((qfi(&fam, PHI).unwrap() - 4.0 * var).abs() < 1e-9);
    }
}

#[test]
fn qfi_is_sign_and_phase_invariant() {
    let mut rng = random::rng(31);
    let families = vec![
        werner_family(3, 0.4),
        ProbeFamily::collective(nghz(4).unwrap()),
        ProbeFamily::new(
            DensityMatrix::new(random::density(&mut rng, 4)).unwrap(),
            random::hermitian(&mut rng, 4),
            Sign::Plus,
        )
        .unwrap(),
    ];
    for fam in families {
        let reference = qfi(&fam, 0.0).unwrap();
        for phi in [0.0, 0.3, 0.7, 1.4] {
            assert!((qfi(&fam, phi).unwrap() - reference).abs() < 1e-9);
            let flipped = fam.clone().with_sign(Sign::Minus);
            assert!((qfi(&flipped, phi).unwrap() - reference).abs() < 1e-9);
        }
    }
}

#[test]
fn state_qfi_agrees_with_generator_formula() {
    let fam = werner_family(3, 0.35);
    let rho = encode(&fam, PHI);
    let drho = crate::probes::d_rho_d_phi(&fam, PHI);
    assert!((state_qfi(rho.matrix(), &drho).unwrap() - qfi(&fam, PHI).unwrap()).abs() < 1e-10);
}

#[test]
fn sld_examples() {
    let fam = werner_family(3, 0.0);
    let s = sld(&fam, PHI).unwrap();
    assert!(s.l.frobenius_norm() < 1e-15);
    assert_eq!(s.support_dim, 8);

    let fam = werner_family(2, 0.5);
    let s = sld(&fam, PHI).unwrap();
    assert!(s.residual < 1e-8);
    assert!(s.l.is_hermitian(1e-12));

    let mut rng = random::rng(9);
    let full_rank = [
        werner_family(2, 0.5),
        werner_family(4, 0.8),
        ProbeFamily::new(
            DensityMatrix::new(random::density(&mut rng, 8)).unwrap(),
            random::hermitian(&mut rng, 8),
            Sign::Minus,
        )
        .unwrap(),
    ];
    for fam in &full_rank {
        let s = sld(fam, PHI).unwrap();
        let rho = encode(fam, PHI);
        let rho_l2 = rho.matrix().matmul(&s.l).matmul(&s.l).trace().re;
        assert!((rho_l2 - qfi(fam, PHI).unwrap()).abs() < 1e-8);
        assert!(s.residual < 1e-8);
    }
}

#[test]
fn sld_identity_on_rank_deficient_states() {
    for n in 1..=4 {
        let fam = ProbeFamily::collective(nghz(n).unwrap());
        let s = sld(&fam, PHI).unwrap();
        let rho = encode(&fam, PHI);
        let rho_l2 = rho.matrix().matmul(&s.l).matmul(&s.l).trace().re;
        assert!((rho_l2 - (n * n) as f64).abs() < 1e-8);
        assert!(s.residual < 1e-8);
        assert_eq!(s.support_dim, 1);
    }
}

#[test]
fn povm_fisher_examples() {
    let fam = werner_family(2, 0.5);
    assert_eq!(povm_fisher(&fam, PHI, &Povm::trivial(4)).unwrap(), 0.0);
    let sld_meas = sld_povm(&sld(&fam, PHI).unwrap()).unwrap();
    assert!((povm_fisher(&fam, PHI, &sld_meas).unwrap() - qfi(&fam, PHI).unwrap()).abs() < 1e-8);
    let g = ProbeFamily::collective(nghz(3).unwrap());
    assert!(povm_fisher(&g, PHI, &Povm::computational(3)).unwrap().abs() < 1e-15);
    assert!(matches!(
        povm_fisher(&g, PHI, &Povm::computational(2)),
        Err(FisherError::DimMismatch { .. })
    ));
}

#[test]
fn povm_derivatives_match_finite_differences() {
    let mut rng = random::rng(12);
    let fam = werner_family(2, 0.6);
    let povm = Povm::new(random::povm_elements(&mut rng, 4, 5)).unwrap();
    let dist_at = |phi: f64| {
        let rho = encode(&fam, phi);
        let drho = crate::probes::d_rho_d_phi(&fam, phi);
        crate::readout::outcome_distribution(&rho, &drho, &povm).unwrap()
    };
    let h = 1e-6;
    let (plus, minus, mid) = (dist_at(PHI + h), dist_at(PHI - h), dist_at(PHI));
    for i in 0..mid.len() {
        let fd = (plus.prob()[i] - minus.prob()[i]) / (2.0 * h);
        let an = mid.dprob()[i];
        assert!(
            (fd - an).abs() <= 1e-6 * an.abs().max(1e-3),
            "outcome {i}: {fd} vs {an}"
        );
    }
}

#[test]
fn optimality_examples() {
    let fam = werner_family(2, 0.5);
    let sld_meas = sld_povm(&sld(&fam, PHI).unwrap()).unwrap();
    let report = optimality_check(&fam, PHI, &sld_meas).unwrap();
    assert!(report.optimal, "max residual {:e}", report.max_residual());

    let report = optimality_check(&fam, PHI, &Povm::trivial(4)).unwrap();
    assert!(!report.optimal);

    let comp = Povm::computational(2);
    let report = optimality_check(&fam, PHI, &comp).unwrap();
    assert!(!report.optimal);
    assert!(povm_fisher(&fam, PHI, &comp).unwrap() < qfi(&fam, PHI).unwrap());
}

#[test]
fn witness_examples() {
    for eta in [0.2, 0.5, 0.8] {
        let w = global_optimality_witness(&werner_family(2, eta), PHI).unwrap();
        assert!(w.commutator_trace.norm() < 1e-8 * w.scale);
        assert!(w.commutator_trace.norm() <= 1e-8 * w.commutator_norm);
        assert!(w.residual > 1e-2 * w.scale);
        assert!(w.full_rank);
        assert_eq!(w.verdict, WitnessVerdict::NoGloballyOptimalMeasurement);
        assert!((w.target_trace.im - 4.0 * eq10(eta)).abs() < 1e-9);
    }
    let w = global_optimality_witness(&werner_family(2, 1.0), PHI).unwrap();
    assert!(!w.full_rank);
    assert_eq!(w.verdict, WitnessVerdict::Inconclusive);
    let w = global_optimality_witness(&werner_family(2, 0.0), PHI).unwrap();
    assert_eq!(w.verdict, WitnessVerdict::ConditionSatisfied);
}

#[test]
fn classically_correlated_qfi_vanishes_in_computational_basis() {
    let t = ClassicalTable::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    let fam = ProbeFamily::collective(classically_correlated(&t));
    assert!(qfi(&fam, PHI).unwrap().abs() < 1e-15);
}

#[test]
fn single_precision_qfi() {
    let fam = ProbeFamily::collective(werner(&WernerSpec::new(2, 0.5f32).unwrap()).unwrap());
    let f = qfi(&fam, 0.7f32).unwrap();
    assert!((f - 4.0 / 3.0).abs() < 1e-5);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn chain_rule_holds_for_random_grids(
            seed in any::<u64>(),
            sizes in prop::collection::vec(2usize..5, 2..5),
        ) {
            let mut rng = random::rng(seed);
            let len: usize = sizes.iter().product();
            let (p, dp) = random::parameterized_distribution::<f64, _>(&mut rng, len, PHI);
            let d = OutcomeDistribution::from_grid(&sizes, p, dp).unwrap();
            let joint = classical_fisher(&d).unwrap();
            let order: Vec<usize> = (0..sizes.len()).rev().collect();
            let sum: f64 = chain_decompose(&d, &order).unwrap().iter().map(|t| t.value).sum();
            prop_assert!((sum - joint).abs() < 1e-9);
        }

        #[test]
        fn random_povms_never_beat_qfi(seed in any::<u64>(), eta in 0.05f64..0.95, outcomes in 2usize..7) {
            let mut rng = random::rng(seed);
            let fam = werner_family(2, eta);
            let povm = Povm::new(random::povm_elements(&mut rng, 4, outcomes)).unwrap();
            prop_assert!(povm_fisher(&fam, PHI, &povm).unwrap() <= qfi(&fam, PHI).unwrap() + 1e-8);
        }
    }
}
