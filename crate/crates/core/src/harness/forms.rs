use super::HarnessError;

fn check_eta(eta: f64) -> Result<(), HarnessError> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(HarnessError::Domain(format!("eta = {eta} is outside [0, 1]")))
    }
}

fn check_n(n: usize, min: usize) -> Result<(), HarnessError> {
    if n >= min {
        Ok(())
    } else {
        Err(HarnessError::Domain(format!("N = {n} is below {min}")))
    }
}

/// `2^{−k}` without overflow for large `k`.
fn inv_pow2(k: usize) -> f64 {
    0.5f64.powi(k.min(i32::MAX as usize) as i32)
}

/// Coherent Fisher information of the two-qubit Werner probe: `8η²/(1+η)`.
pub fn f_co_w(eta: f64) -> Result<f64, HarnessError> {
    check_eta(eta)?;
    Ok(8.0 * eta * eta / (1.0 + eta))
}

/// Adaptive Fisher information of the two-qubit Werner probe: `4η²`.
pub fn f_ad_w(eta: f64) -> Result<f64, HarnessError> {
    check_eta(eta)?;
    Ok(4.0 * eta * eta)
}

/// `2^N N²η² / (2^N η + 2(1−η))`, evaluated as `N²η² / (η + 2(1−η)2^{−N})`.
pub fn f_co_wn(n: usize, eta: f64) -> Result<f64, HarnessError> {
    check_n(n, 1)?;
    check_eta(eta)?;
    let nn = (n * n) as f64;
    Ok(nn * eta * eta / (eta + 2.0 * (1.0 - eta) * inv_pow2(n)))
}

/// `N²η²`.
pub fn f_ad_wn(n: usize, eta: f64) -> Result<f64, HarnessError> {
    check_n(n, 1)?;
    check_eta(eta)?;
    Ok((n * n) as f64 * eta * eta)
}

/// Quantum Fisher information of the `N−1` qubits left after one qubit of an
/// `N`-qubit Werner probe is found along `m₀⟨0| + m₁⟨1|`:
/// `4·2^{N−1} N² |m₀m₁|² η² / (2^{N−1}η + 2(1−η))`, with `m0_m1 = |m₀m₁| ≤ 1/2`.
pub fn f_co_conditional(n: usize, eta: f64, m0_m1: f64) -> Result<f64, HarnessError> {
    check_n(n, 2)?;
    check_eta(eta)?;
    if !(0.0..=0.5).contains(&m0_m1) {
        return Err(HarnessError::Domain(format!("|m0 m1| = {m0_m1} is outside [0, 1/2]")));
    }
    let nn = (n * n) as f64;
    Ok(4.0 * nn * m0_m1 * m0_m1 * eta * eta / (eta + 2.0 * (1.0 - eta) * inv_pow2(n - 1)))
}

/// Fisher information of the φ-independent `|±⟩` protocol on the Werner
/// probe: `N²η² sin²(Nφ) / (1 − η² cos²(Nφ))`.
pub fn paper_policy_fisher(n: usize, eta: f64, phi: f64) -> Result<f64, HarnessError> {
    check_n(n, 1)?;
    check_eta(eta)?;
    let x = n as f64 * phi;
    let denominator = 1.0 - (eta * x.cos()).powi(2);
    if denominator <= 0.0 {
        return Err(HarnessError::Domain(format!(
            "parity statistics are deterministic at N·φ = {x}; the Fisher information diverges"
        )));
    }
    Ok((n * n) as f64 * eta * eta * x.sin().powi(2) / denominator)
}

/// Precision gain of coherent over adaptive readout, `√(F_co / F_ad)`.
pub fn precision_gain(n: usize, eta: f64) -> Result<f64, HarnessError> {
    check_n(n, 1)?;
    check_eta(eta)?;
    if eta == 0.0 {
        return Err(HarnessError::Domain(
            "both strategies carry no information at eta = 0".into(),
        ));
    }
    Ok((1.0 / (eta + 2.0 * (1.0 - eta) * inv_pow2(n))).sqrt())
}

/// A named reference formula over `(N, η)`.
#[derive(Clone, Copy, Debug)]
pub struct ClosedForm {
    pub name: &'static str,
    /// Number of arguments the formula actually depends on.
    pub arity: usize,
    pub formula: &'static str,
    evaluator: fn(usize, f64) -> Result<f64, HarnessError>,
}

impl ClosedForm {
    pub fn eval(&self, n: usize, eta: f64) -> Result<f64, HarnessError> {
        (self.evaluator)(n, eta)
    }
}

pub fn closed_forms() -> Vec<ClosedForm> {
    vec![
        ClosedForm {
            name: "f_co_w",
            arity: 1,
            formula: "8 eta^2 / (1 + eta)",
            evaluator: |_, eta| f_co_w(eta),
        },
        ClosedForm {
            name: "f_ad_w",
            arity: 1,
            formula: "4 eta^2",
            evaluator: |_, eta| f_ad_w(eta),
        },
        ClosedForm {
            name: "f_co_wn",
            arity: 2,
            formula: "2^N N^2 eta^2 / (2^N eta + 2 (1 - eta))",
            evaluator: f_co_wn,
        },
        ClosedForm {
            name: "f_ad_wn",
            arity: 2,
            formula: "N^2 eta^2",
            evaluator: f_ad_wn,
        },
        ClosedForm {
            name: "f_co_conditional",
            arity: 2,
            formula: "2^(N-1) N^2 eta^2 / (2^(N-1) eta + 2 (1 - eta)), the |m0 m1| = 1/2 maximum",
            evaluator: |n, eta| f_co_conditional(n, eta, 0.5),
        },
        ClosedForm {
            name: "precision_gain",
            arity: 2,
            formula: "sqrt(f_co_wn / f_ad_wn)",
            evaluator: precision_gain,
        },
    ]
}
