//! Phase estimation with noisy multi-qubit probes.
//!
//! The crate computes quantum and classical Fisher information for probes
//! `ρ_φ = e^{∓iφH} ρ e^{±iφH}`, compares entangled (coherent) readout with
//! sequential local measurements that feed outcomes forward, and optimizes
//! the latter. Every numerical kernel is generic over [`Real`]; the aliases
//! below fix the scalar to `f64` or `f32`.

// `!(x <= tol)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fisher;
pub mod harness;
pub mod numerics;
pub mod probes;
pub mod random;
pub mod readout;
mod scalar;
pub mod tol;

pub use scalar::{Real, C};

pub type Complex64 = C<f64>;
pub type Complex32 = C<f32>;
pub type ComplexMatrix64 = numerics::ComplexMatrix<f64>;
pub type ComplexMatrix32 = numerics::ComplexMatrix<f32>;
pub type HermitianEigensystem64 = numerics::HermitianEigensystem<f64>;
pub type DensityMatrix64 = probes::DensityMatrix<f64>;
pub type DensityMatrix32 = probes::DensityMatrix<f32>;
pub type ProbeFamily64 = probes::ProbeFamily<f64>;
pub type ProbeFamily32 = probes::ProbeFamily<f32>;
pub type Povm64 = readout::Povm<f64>;
pub type Povm32 = readout::Povm<f32>;
pub type OutcomeDistribution64 = fisher::OutcomeDistribution<f64>;
pub type OutcomeDistribution32 = fisher::OutcomeDistribution<f32>;
