use serde::Serialize;

use super::forms::{f_ad_wn, f_co_wn, paper_policy_fisher};
use super::sweep::{number, Strategy};
use super::HarnessError;
use crate::fisher::{classical_fisher, global_optimality_witness, qfi, sld, WitnessVerdict};
use crate::probes::ProbeFamily;
use crate::probes::{GeneratorSpec, StateDescriptor, StateKind};
use crate::readout::{optimize_adaptive, paper_policy, paper_policy_at, run_adaptive, AdaptivePolicy, OptimizeConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessSummary {
    /// `[re, im]` of `tr [L₀, H]`.
    pub commutator_trace: [f64; 2],
    /// `[re, im]` of `i·F·dim`.
    pub target_trace: [f64; 2],
    pub residual: f64,
    pub scale: f64,
    pub full_rank: bool,
    pub verdict: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerSummary {
    pub evaluations: usize,
    pub iterations: usize,
    pub budget_exceeded: bool,
}

/// Everything computed for one probe family and one readout strategy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioRecord {
    pub state: StateDescriptor,
    pub n_qubits: usize,
    pub phi: f64,
    pub strategy: Strategy,
    pub qfi: f64,
    /// Fisher information of the chosen strategy.
    pub fisher: f64,
    /// Reference value when the probe has one (Werner and NGHZ families
    /// under the collective generator).
    pub closed_form: Option<f64>,
    pub abs_err: Option<f64>,
    /// `‖∂ρ − (ρL + Lρ)/2‖_F`.
    pub sld_residual: f64,
    pub witness: WitnessSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<AdaptivePolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerSummary>,
}

/// `(N, η)` when the descriptor is a collective-generator Werner-type probe.
fn werner_parameters(d: &StateDescriptor) -> Option<(usize, f64)> {
    if d.generator != GeneratorSpec::Collective {
        return None;
    }
    match d.state {
        StateKind::Werner { n, eta } => Some((n, eta)),
        StateKind::Nghz { n } => Some((n, 1.0)),
        StateKind::Bell => Some((2, 1.0)),
        _ => None,
    }
}

impl ScenarioRecord {
    /// Visibility of Werner-type probes, `None` for other kinds.
    pub fn eta(&self) -> Option<f64> {
        werner_parameters(&self.state).map(|(_, eta)| eta)
    }

    /// One line in the sweep CSV layout, without a trailing newline.
    pub fn csv_row(&self, runtime_ms: Option<f64>) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.state.kind_name(),
            self.n_qubits,
            number(self.eta()),
            number(Some(self.phi)),
            self.strategy,
            number(Some(self.fisher)),
            number(self.closed_form),
            number(self.abs_err),
            runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default()
        )
    }
}

fn witness_summary(family: &ProbeFamily<f64>, phi: f64) -> Result<WitnessSummary, HarnessError> {
    let w = global_optimality_witness(family, phi)?;
    let verdict = match w.verdict {
        WitnessVerdict::NoGloballyOptimalMeasurement => "no-globally-optimal-measurement",
        WitnessVerdict::ConditionSatisfied => "condition-satisfied",
        WitnessVerdict::Inconclusive => "inconclusive",
    };
    Ok(WitnessSummary {
        commutator_trace: [w.commutator_trace.re, w.commutator_trace.im],
        target_trace: [w.target_trace.re, w.target_trace.im],
        residual: w.residual,
        scale: w.scale,
        full_rank: w.full_rank,
        verdict,
    })
}

/// Evaluates a user-supplied policy; there is no closed form to compare with.
pub fn run_policy_scenario(
    descriptor: &StateDescriptor,
    policy: AdaptivePolicy,
    phi: f64,
) -> Result<ScenarioRecord, HarnessError> {
    let family = descriptor.family::<f64>()?;
    let fisher = classical_fisher(&run_adaptive(&family, phi, &policy)?.distribution)?;
    Ok(ScenarioRecord {
        state: descriptor.clone(),
        n_qubits: family.qubits(),
        phi,
        strategy: Strategy::Adaptive,
        qfi: qfi(&family, phi)?,
        fisher,
        closed_form: None,
        abs_err: None,
        sld_residual: sld(&family, phi)?.residual,
        witness: witness_summary(&family, phi)?,
        policy: Some(policy),
        optimizer: None,
    })
}

pub fn run_scenario(
    descriptor: &StateDescriptor,
    strategy: Strategy,
    phi: f64,
    seed: u64,
) -> Result<ScenarioRecord, HarnessError> {
    let family = descriptor.family::<f64>()?;
    let n = family.qubits();
    let q = qfi(&family, phi)?;
    let mut policy = None;
    let mut optimizer = None;
    let fisher = match strategy {
        Strategy::Coherent => q,
        Strategy::Adaptive | Strategy::PaperPolicy => {
            let p = if strategy == Strategy::Adaptive {
                paper_policy_at(n, phi, family.sign())?
            } else {
                paper_policy(n)?
            };
            let f = classical_fisher(&run_adaptive(&family, phi, &p)?.distribution)?;
            policy = Some(p);
            f
        }
        Strategy::Optimize => {
            let config = OptimizeConfig {
                seed,
                ..OptimizeConfig::default()
            };
            let result = optimize_adaptive(&family, phi, &config)?;
            optimizer = Some(OptimizerSummary {
                evaluations: result.evaluations,
                iterations: result.iterations,
                budget_exceeded: result.budget_exceeded,
            });
            policy = Some(result.policy);
            result.fisher
        }
    };
    let closed_form = werner_parameters(descriptor).and_then(|(n, eta)| match strategy {
        Strategy::Coherent => f_co_wn(n, eta).ok(),
        Strategy::Adaptive | Strategy::Optimize => f_ad_wn(n, eta).ok(),
        Strategy::PaperPolicy => paper_policy_fisher(n, eta, phi).ok(),
    });
    Ok(ScenarioRecord {
        state: descriptor.clone(),
        n_qubits: n,
        phi,
        strategy,
        qfi: q,
        fisher,
        closed_form,
        abs_err: closed_form.map(|c| (c - fisher).abs()),
        sld_residual: sld(&family, phi)?.residual,
        witness: witness_summary(&family, phi)?,
        policy,
        optimizer,
    })
}
