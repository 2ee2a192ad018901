//! Closed-form references, the acceptance suite, parameter sweeps and
//! single-scenario records.

mod acceptance;
mod forms;
mod scenario;
mod sweep;

pub use acceptance::{criteria, run_verify, Check, Criterion, CriterionOutcome, VerifyReport};
pub use forms::{
    closed_forms, f_ad_w, f_ad_wn, f_co_conditional, f_co_w, f_co_wn, paper_policy_fisher, precision_gain, ClosedForm,
};
pub use scenario::{run_policy_scenario, run_scenario, OptimizerSummary, ScenarioRecord, WitnessSummary};
pub use sweep::{render_csv, render_json, run_sweep, Strategy, SweepKind, SweepRow, SweepSpec, CSV_HEADER};

use thiserror::Error;

use crate::fisher::FisherError;
use crate::probes::ProbeError;
use crate::readout::{PovmError, ReadoutError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("outside the domain of the closed form: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Readout(#[from] ReadoutError),
    #[error(transparent)]
    Fisher(#[from] FisherError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Povm(#[from] PovmError),
}
