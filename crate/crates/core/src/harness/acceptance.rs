use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use super::forms::{f_ad_w, f_ad_wn, f_co_w, f_co_wn, precision_gain};
use super::HarnessError;
use crate::fisher::{
    chain_decompose, classical_fisher, global_optimality_witness, povm_fisher, qfi, OutcomeDistribution,
};
use crate::numerics::{ComplexMatrix, Sign};
use crate::probes::{
    bell00, classically_correlated, d_rho_d_phi, encode, nghz, werner, ClassicalTable, DensityMatrix, ProbeFamily,
    WernerSpec,
};
use crate::random;
use crate::readout::{
    coherent_nghz_readout, optimize_adaptive, outcome_distribution, paper_policy, paper_policy_at, run_adaptive,
    AdaptivePolicy, Correction, LocalBasis, OptimizeConfig, Povm,
};
use crate::tol::DEFAULT_PHI;

/// Verdict and a one-line account of what was measured.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    check: fn() -> Result<Check, HarnessError>,
}

impl fmt::Debug for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Criterion")
            .field("id", &self.id)
            .field("title", &self.title)
            .finish()
    }
}

impl Criterion {
    pub fn run(&self) -> CriterionOutcome {
        let start = Instant::now();
        let result = (self.check)();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(c) => (c.passed, c.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionOutcome {
            id: self.id,
            title: self.title,
            passed,
            detail,
            elapsed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {}: {} ({:.1} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64() * 1e3
        )
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub outcomes: Vec<CriterionOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CriterionOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        let passed = self.outcomes.iter().filter(|o| o.passed).count();
        write!(f, "{passed}/{} criteria passed", self.outcomes.len())
    }
}

/// Runs every acceptance criterion in order.
pub fn run_verify() -> VerifyReport {
    VerifyReport {
        outcomes: criteria().iter().map(Criterion::run).collect(),
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            title: "two-qubit Werner coherent FI",
            check: werner_coherent,
        },
        Criterion {
            id: 2,
            title: "two-qubit Werner adaptive FI and coherent gap",
            check: werner_adaptive,
        },
        Criterion {
            id: 3,
            title: "multipartite Werner closed forms",
            check: multipartite_forms,
        },
        Criterion {
            id: 4,
            title: "Heisenberg limit for pure NGHZ",
            check: heisenberg_limit,
        },
        Criterion {
            id: 5,
            title: "classical chain rule",
            check: chain_rule,
        },
        Criterion {
            id: 6,
            title: "classically correlated probes: adaptive equals QFI",
            check: classically_correlated_probes,
        },
        Criterion {
            id: 7,
            title: "global-optimality witness",
            check: witness,
        },
        Criterion {
            id: 8,
            title: "NMR-regime precision gain",
            check: nmr_gain,
        },
        Criterion {
            id: 9,
            title: "derivative oracle",
            check: derivative_oracle,
        },
        Criterion {
            id: 10,
            title: "monotonicity and phase invariance",
            check: monotonicity,
        },
    ]
}

const PHI: f64 = DEFAULT_PHI;

fn werner_family(n: usize, eta: f64) -> Result<ProbeFamily<f64>, HarnessError> {
    Ok(ProbeFamily::collective(werner(&WernerSpec::new(n, eta)?)?))
}

fn adaptive_fisher(family: &ProbeFamily<f64>, phi: f64, policy: &AdaptivePolicy) -> Result<f64, HarnessError> {
    Ok(classical_fisher(&run_adaptive(family, phi, policy)?.distribution)?)
}

fn tenths() -> impl Iterator<Item = f64> {
    (0..=10).map(|k| k as f64 / 10.0)
}

fn werner_coherent() -> Result<Check, HarnessError> {
    let start = Instant::now();
    let mut max_err = 0.0f64;
    for eta in tenths() {
        let err = (qfi(&werner_family(2, eta)?, PHI)? - f_co_w(eta)?).abs();
        max_err = max_err.max(err);
    }
    let elapsed = start.elapsed();
    Ok(Check {
        passed: max_err < 1e-9 && elapsed < Duration::from_secs(1),
        detail: format!(
            "max |QFI - 8η²/(1+η)| = {max_err:.3e} over 11 η values in {:.1} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    })
}

fn werner_adaptive() -> Result<Check, HarnessError> {
    let policy = paper_policy_at(2, PHI, Sign::Plus)?;
    let mut max_err = 0.0f64;
    for eta in tenths() {
        let err = (adaptive_fisher(&werner_family(2, eta)?, PHI, &policy)? - f_ad_w(eta)?).abs();
        max_err = max_err.max(err);
    }
    let fam = werner_family(2, 0.5)?;
    let best = optimize_adaptive(&fam, PHI, &OptimizeConfig::default())?.fisher;
    let coherent = qfi(&fam, PHI)?;
    let passed = max_err < 1e-9 && best >= 1.0 - 1e-3 && best <= coherent - 0.2;
    Ok(Check {
        passed,
        detail: format!(
            "max |F_ad - 4η²| = {max_err:.3e}; optimized adaptive at η=0.5 = {best:.9}, coherent = {coherent:.9}, gap = {:.6}",
            coherent - best
        ),
    })
}

fn multipartite_forms() -> Result<Check, HarnessError> {
    let start = Instant::now();
    let (mut co_err, mut ad_err) = (0.0f64, 0.0f64);
    for n in 2..=8 {
        let policy = paper_policy_at(n, PHI, Sign::Plus)?;
        for eta in [0.25, 0.5, 0.9] {
            let fam = werner_family(n, eta)?;
            co_err = co_err.max((qfi(&fam, PHI)? - f_co_wn(n, eta)?).abs());
            ad_err = ad_err.max((adaptive_fisher(&fam, PHI, &policy)? - f_ad_wn(n, eta)?).abs());
        }
    }
    let elapsed = start.elapsed();
    Ok(Check {
        passed: co_err < 1e-9 && ad_err < 1e-9 && elapsed < Duration::from_secs(60),
        detail: format!(
            "N = 2..8, η ∈ {{0.25, 0.5, 0.9}}: max coherent err {co_err:.3e}, max adaptive err {ad_err:.3e} in {:.2} s",
            elapsed.as_secs_f64()
        ),
    })
}

fn heisenberg_limit() -> Result<Check, HarnessError> {
    let mut errs = [0.0f64; 3];
    for n in 1..=8 {
        let fam = ProbeFamily::collective(nghz(n)?);
        let target = (n * n) as f64;
        let values = [
            qfi(&fam, PHI)?,
            povm_fisher(&fam, PHI, &coherent_nghz_readout(n)?)?,
            adaptive_fisher(&fam, PHI, &paper_policy(n)?)?,
        ];
        for (e, v) in errs.iter_mut().zip(values) {
            *e = e.max((v - target).abs());
        }
    }
    Ok(Check {
        passed: errs.iter().all(|&e| e < 1e-9),
        detail: format!(
            "N = 1..8: max |F - N²| QFI {:.3e}, CNOT readout {:.3e}, adaptive {:.3e}",
            errs[0], errs[1], errs[2]
        ),
    })
}

fn chain_rule() -> Result<Check, HarnessError> {
    let mut rng = random::rng(5);
    let mut max_err = 0.0f64;
    for _ in 0..200 {
        let parts = rng.gen_range(2..=4);
        let sizes: Vec<usize> = (0..parts).map(|_| rng.gen_range(2..=4)).collect();
        let len = sizes.iter().product();
        let (p, dp) = random::parameterized_distribution::<f64, _>(&mut rng, len, PHI);
        let d = OutcomeDistribution::from_grid(&sizes, p, dp)?;
        let mut order: Vec<usize> = (0..parts).collect();
        order.shuffle(&mut rng);
        let sum: f64 = chain_decompose(&d, &order)?.iter().map(|t| t.value).sum();
        max_err = max_err.max((sum - classical_fisher(&d)?).abs());
    }
    Ok(Check {
        passed: max_err < 1e-9,
        detail: format!("200 distributions with 2-4 parts: max |F(joint) - Σ chain| = {max_err:.3e}"),
    })
}

/// Seeded two-qubit classical table in random local bases, encoded by the
/// collective generator.
pub(crate) fn classical_probe(rng: &mut impl Rng) -> Result<ProbeFamily<f64>, HarnessError> {
    let probs = random::probability_vector::<f64, _>(rng, 4);
    let bases = vec![random::unitary::<f64, _>(rng, 2), random::unitary::<f64, _>(rng, 2)];
    let table = ClassicalTable::with_local_bases(2, probs, bases)?;
    Ok(ProbeFamily::collective(classically_correlated(&table)))
}

fn classically_correlated_probes() -> Result<Check, HarnessError> {
    let mut rng = random::rng(6);
    let mut max_gap = 0.0f64;
    let mut within = 0;
    for _ in 0..20 {
        let fam = classical_probe(&mut rng)?;
        let target = qfi(&fam, PHI)?;
        let found = optimize_adaptive(&fam, PHI, &OptimizeConfig::default())?.fisher;
        let gap = (target - found).abs();
        if gap < 2e-3 {
            within += 1;
        }
        max_gap = max_gap.max(gap);
    }
    Ok(Check {
        passed: within == 20,
        detail: format!("{within}/20 tables within 2e-3 of the QFI; max |QFI - F_ad| = {max_gap:.3e}"),
    })
}

fn witness() -> Result<Check, HarnessError> {
    let mut ok = true;
    let mut worst_trace = 0.0f64;
    let mut min_residual = f64::INFINITY;
    for eta in [0.2, 0.5, 0.8] {
        let w = global_optimality_witness(&werner_family(2, eta)?, PHI)?;
        let trace_ratio = w.commutator_trace.norm() / w.scale;
        let residual_ratio = w.residual / w.scale;
        ok &= trace_ratio < 1e-8 && residual_ratio > 1e-2 && w.full_rank;
        worst_trace = worst_trace.max(trace_ratio);
        min_residual = min_residual.min(residual_ratio);
    }
    let pure = global_optimality_witness(&werner_family(2, 1.0)?, PHI)?;
    ok &= !pure.full_rank;
    Ok(Check {
        passed: ok,
        detail: format!(
            "max |tr[L0,H]|/scale = {worst_trace:.3e}, min residual/scale = {min_residual:.3e}, full rank at η=1: {}",
            pure.full_rank
        ),
    })
}

fn nmr_gain() -> Result<Check, HarnessError> {
    let start = Instant::now();
    let gain = precision_gain(25, 1e-5)?;
    let elapsed = start.elapsed();
    Ok(Check {
        passed: gain > 300.0 && elapsed < Duration::from_millis(50),
        detail: format!("sqrt(F_co/F_ad) at N=25, η=1e-5 is {gain:.6}"),
    })
}

fn oracle_families(rng: &mut impl Rng) -> Result<Vec<ProbeFamily<f64>>, HarnessError> {
    let mut families = vec![];
    for n in 2..=4 {
        for eta in [0.3, 0.8] {
            families.push(werner_family(n, eta)?);
        }
    }
    for n in 1..=4 {
        families.push(ProbeFamily::collective(nghz(n)?));
    }
    families.push(ProbeFamily::collective(bell00()));
    families.push(classical_probe(rng)?);
    families.push(werner_family(3, 0.6)?.with_sign(Sign::Minus));
    for dim in [2, 4, 8] {
        let rho = DensityMatrix::new(random::density(rng, dim))?;
        families.push(ProbeFamily::new(rho, random::hermitian(rng, dim), Sign::Plus)?);
    }
    Ok(families)
}

/// Largest `|fd − a| / max(|a|, 10⁻³·scale)`, so entries that vanish
/// analytically are judged against the size of the whole derivative.
fn relative_error(fd: &[f64], analytic: &[f64]) -> f64 {
    let scale = analytic.iter().map(|x| x.abs()).fold(0.0, f64::max);
    fd.iter()
        .zip(analytic)
        .map(|(f, a)| (f - a).abs() / a.abs().max(1e-3 * scale).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

fn random_policy(rng: &mut impl Rng, n: usize) -> Result<AdaptivePolicy, HarnessError> {
    let mut policy = AdaptivePolicy::uniform(n, LocalBasis::plus_minus(), Correction::None)?;
    let keys: Vec<Vec<usize>> = policy
        .nodes()
        .keys()
        .map(|k| k.bytes().map(|b| (b - b'0') as usize).collect())
        .collect();
    for h in keys {
        let basis = LocalBasis::new(
            rng.gen_range(0.0..=std::f64::consts::PI),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )?;
        policy.set_basis(&h, basis)?;
    }
    Ok(policy)
}

fn derivative_oracle() -> Result<Check, HarnessError> {
    let mut rng = random::rng(9);
    let h = 1e-6;
    let (mut state_err, mut povm_err, mut adaptive_err) = (0.0f64, 0.0f64, 0.0f64);
    let families = oracle_families(&mut rng)?;
    for fam in &families {
        let povm = Povm::new(random::povm_elements(&mut rng, fam.dim(), 5))?;
        let policy = random_policy(&mut rng, fam.qubits())?;
        for phi in [0.0, 0.3, PHI, 1.1] {
            let flatten =
                |m: &ComplexMatrix<f64>| -> Vec<f64> { m.as_slice().iter().flat_map(|z| [z.re, z.im]).collect() };
            let fd = (encode(fam, phi + h).matrix() - encode(fam, phi - h).matrix()).scale_real(0.5 / h);
            state_err = state_err.max(relative_error(&flatten(&fd), &flatten(&d_rho_d_phi(fam, phi))));

            let dist = |x: f64| outcome_distribution(&encode(fam, x), &d_rho_d_phi(fam, x), &povm);
            let (plus, minus, mid) = (dist(phi + h)?, dist(phi - h)?, dist(phi)?);
            let fd: Vec<f64> = plus
                .prob()
                .iter()
                .zip(minus.prob())
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            povm_err = povm_err.max(relative_error(&fd, mid.dprob()));

            let run = |x: f64| run_adaptive(fam, x, &policy).map(|o| o.distribution);
            let (plus, minus, mid) = (run(phi + h)?, run(phi - h)?, run(phi)?);
            let fd: Vec<f64> = plus
                .prob()
                .iter()
                .zip(minus.prob())
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            adaptive_err = adaptive_err.max(relative_error(&fd, mid.dprob()));
        }
    }
    Ok(Check {
        passed: state_err < 1e-6 && povm_err < 1e-6 && adaptive_err < 1e-6,
        detail: format!(
            "{} families × 4 angles: max relative error ∂ρ {state_err:.3e}, POVM dp {povm_err:.3e}, adaptive dp {adaptive_err:.3e}",
            families.len()
        ),
    })
}

fn monotonicity() -> Result<Check, HarnessError> {
    let mut rng = random::rng(10);
    let mut povm_excess = f64::NEG_INFINITY;
    for k in 1..=9 {
        let fam = werner_family(2, k as f64 / 10.0)?;
        let bound = qfi(&fam, PHI)?;
        for _ in 0..100 {
            let outcomes = rng.gen_range(2..=8);
            let povm = Povm::new(random::povm_elements(&mut rng, 4, outcomes))?;
            povm_excess = povm_excess.max(povm_fisher(&fam, PHI, &povm)? - bound);
        }
    }
    let mut adaptive_excess = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = rng.gen_range(2..=4);
        let fam = werner_family(n, rng.gen_range(0.0..=1.0))?;
        let policy = random_policy(&mut rng, n)?;
        adaptive_excess = adaptive_excess.max(adaptive_fisher(&fam, PHI, &policy)? - qfi(&fam, PHI)?);
    }
    let mut phase_spread = 0.0f64;
    let families = oracle_families(&mut rng)?;
    for fam in &families {
        let values = [0.0, 0.3, 0.7, 1.4]
            .iter()
            .map(|&phi| qfi(fam, phi))
            .collect::<Result<Vec<_>, _>>()?;
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        phase_spread = phase_spread.max(hi - lo);
    }
    Ok(Check {
        passed: povm_excess <= 1e-8 && adaptive_excess <= 1e-8 && phase_spread < 1e-9,
        detail: format!(
            "max (F_POVM - QFI) = {povm_excess:.3e} over 900 POVMs, max (F_ad - QFI) = {adaptive_excess:.3e} over 100 policies, max QFI spread over φ = {phase_spread:.3e}"
        ),
    })
}
