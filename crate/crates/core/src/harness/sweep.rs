use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forms::{f_ad_wn, f_co_wn, paper_policy_fisher};
use super::HarnessError;
use crate::fisher::{classical_fisher, qfi};
use crate::numerics::Sign;
use crate::probes::{nghz, werner, ProbeFamily, WernerSpec};
use crate::readout::{optimize_adaptive, paper_policy, paper_policy_at, run_adaptive, OptimizeConfig};
use crate::tol;

pub const CSV_HEADER: &str = "kind,n,eta,phi,strategy,fisher,closed_form,abs_err,runtime_ms";

/// How the phase is read out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Best measurement over all POVMs (the quantum Fisher information).
    Coherent,
    /// `|±⟩` protocol with the last basis tuned to the evaluation angle.
    Adaptive,
    /// φ-independent `|±⟩` protocol with parity correction.
    PaperPolicy,
    /// Numerically optimized adaptive policy.
    Optimize,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Coherent,
        Strategy::Adaptive,
        Strategy::PaperPolicy,
        Strategy::Optimize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Coherent => "coherent",
            Strategy::Adaptive => "adaptive",
            Strategy::PaperPolicy => "paper-policy",
            Strategy::Optimize => "optimize",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::Input(format!("unknown strategy `{s}`")))
    }
}

/// Probe families a sweep can scan over `(N, η)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Werner,
    /// Pure NGHZ; the `η` grid is ignored and reported as 1.
    Nghz,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Werner => "werner",
            SweepKind::Nghz => "nghz",
        }
    }
}

impl FromStr for SweepKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "werner" => Ok(SweepKind::Werner),
            "nghz" => Ok(SweepKind::Nghz),
            _ => Err(HarnessError::Input(format!(
                "sweeps support werner and nghz, not `{s}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub n_values: Vec<usize>,
    pub etas: Vec<f64>,
    pub phis: Vec<f64>,
    pub strategies: Vec<Strategy>,
    /// Skip all simulation and report closed forms only.
    pub closed_form_only: bool,
    /// Record per-row wall-clock time. Disable for byte-reproducible output.
    pub timing: bool,
    /// Seeds the adaptive optimizer.
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let empty = |what: &str| Err(HarnessError::Input(format!("sweep needs at least one {what}")));
        if self.n_values.is_empty() {
            return empty("N");
        }
        if self.etas.is_empty() && self.kind == SweepKind::Werner {
            return empty("eta");
        }
        if self.phis.is_empty() {
            return empty("phi");
        }
        if self.strategies.is_empty() {
            return empty("strategy");
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n == 0) {
            return Err(HarnessError::Input(format!("N = {n} is not a register size")));
        }
        if let Some(eta) = self.etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(HarnessError::Input(format!("eta = {eta} is outside [0, 1]")));
        }
        if let Some(phi) = self.phis.iter().find(|p| !p.is_finite()) {
            return Err(HarnessError::Input(format!("phi = {phi} is not finite")));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<(usize, f64, f64, Strategy)> {
        let etas = match self.kind {
            SweepKind::Werner => self.etas.clone(),
            SweepKind::Nghz => vec![1.0],
        };
        let mut points = vec![];
        for &n in &self.n_values {
            for &eta in &etas {
                for &phi in &self.phis {
                    for &s in &self.strategies {
                        points.push((n, eta, phi, s));
                    }
                }
            }
        }
        points
    }
}

/// One `(kind, N, η, φ, strategy)` grid point. `fisher` is empty when the
/// point was served by the closed form alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: SweepKind,
    pub n: usize,
    pub eta: f64,
    pub phi: f64,
    pub strategy: Strategy,
    pub fisher: Option<f64>,
    pub closed_form: Option<f64>,
    pub abs_err: Option<f64>,
    pub runtime_ms: Option<f64>,
}

fn closed_form(n: usize, eta: f64, phi: f64, strategy: Strategy) -> Option<f64> {
    match strategy {
        Strategy::Coherent => f_co_wn(n, eta).ok(),
        Strategy::Adaptive | Strategy::Optimize => f_ad_wn(n, eta).ok(),
        Strategy::PaperPolicy => paper_policy_fisher(n, eta, phi).ok(),
    }
}

fn simulate(kind: SweepKind, n: usize, eta: f64, phi: f64, strategy: Strategy, seed: u64) -> Result<f64, HarnessError> {
    let state = match kind {
        SweepKind::Werner => werner(&WernerSpec::new(n, eta)?)?,
        SweepKind::Nghz => nghz(n)?,
    };
    let family = ProbeFamily::collective(state);
    Ok(match strategy {
        Strategy::Coherent => qfi(&family, phi)?,
        Strategy::Adaptive => {
            let policy = paper_policy_at(n, phi, Sign::Plus)?;
            classical_fisher(&run_adaptive(&family, phi, &policy)?.distribution)?
        }
        Strategy::PaperPolicy => classical_fisher(&run_adaptive(&family, phi, &paper_policy(n)?)?.distribution)?,
        Strategy::Optimize => {
            let config = OptimizeConfig {
                seed,
                ..OptimizeConfig::default()
            };
            optimize_adaptive(&family, phi, &config)?.fisher
        }
    })
}

fn simulable(n: usize, strategy: Strategy) -> bool {
    match strategy {
        Strategy::Optimize => n <= tol::OPTIMIZER_QUBIT_LIMIT,
        _ => n <= tol::DENSE_QUBIT_LIMIT,
    }
}

/// Evaluates every grid point on a worker pool; rows come back in grid
/// order (N, then η, then φ, then strategy) regardless of completion order.
/// Points beyond the dense budget get closed-form rows.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, HarnessError> {
    spec.validate()?;
    spec.grid()
        .into_par_iter()
        .map(|(n, eta, phi, strategy)| {
            let start = Instant::now();
            let closed = closed_form(n, eta, phi, strategy);
            let fisher = if spec.closed_form_only || !simulable(n, strategy) {
                None
            } else {
                Some(simulate(spec.kind, n, eta, phi, strategy, spec.seed)?)
            };
            let abs_err = match (fisher, closed) {
                (Some(f), Some(c)) => Some((f - c).abs()),
                _ => None,
            };
            let runtime_ms = spec.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            Ok(SweepRow {
                kind: spec.kind,
                n,
                eta,
                phi,
                strategy,
                fisher,
                closed_form: closed,
                abs_err,
                runtime_ms,
            })
        })
        .collect()
}

/// 17 significant digits: enough to round-trip any binary64 value.
pub(crate) fn number(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let runtime = r.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.kind.name(),
            r.n,
            number(Some(r.eta)),
            number(Some(r.phi)),
            r.strategy,
            number(r.fisher),
            number(r.closed_form),
            number(r.abs_err),
            runtime
        ));
    }
    out
}

pub fn render_json(rows: &[SweepRow]) -> String {
    let mut text = serde_json::to_string_pretty(rows).expect("rows serialize");
    text.push('\n');
    text
}
