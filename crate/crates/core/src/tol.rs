//! Centralized numerical tolerances.
//!
//! Every threshold used by the kernels lives here so that a single table
//! governs what counts as Hermitian, positive, normalized or converged.
//! Values are given for binary64; [`Real::tol`](crate::Real::tol) floors them
//! for lower-precision scalars.

/// Hermiticity: `‖A − A†‖_F ≤ HERMITIAN · ‖A‖_F`.
pub const HERMITIAN: f64 = 1e-10;
/// Unit trace and `Σ Π_x = I` checks.
pub const TRACE: f64 = 1e-10;
/// Smallest admissible eigenvalue of a PSD operator (absolute).
pub const PSD_EIGENVALUE: f64 = 1e-10;

/// Jacobi sweep cap.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Jacobi convergence: off-diagonal Frobenius norm `≤ JACOBI_OFF_DIAGONAL · ‖A‖_F`.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-12;

/// Eigenvalue pairs with `λ_i + λ_j ≤ SUPPORT_CUTOFF · λ_max` are outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Outcomes with probability at or below this are dropped from Fisher sums.
pub const ZERO_PROBABILITY: f64 = 1e-14;
/// A dropped outcome whose derivative exceeds this makes the Fisher information diverge.
pub const SINGULAR_DERIVATIVE: f64 = 1e-7;
/// Most negative probability tolerated in an outcome distribution.
pub const NEGATIVE_PROBABILITY: f64 = 1e-12;
/// Normalization of outcome probabilities and vanishing sum of their derivatives.
pub const PROBABILITY_SUM: f64 = 1e-10;
/// Normalization of classical probability tables.
pub const TABLE_SUM: f64 = 1e-12;

/// Optimality verdict: residuals `< OPTIMALITY · ‖ρ^{1/2}‖_F`.
pub const OPTIMALITY: f64 = 1e-6;
/// Witness verdict: residual tolerance `WITNESS · ‖L₀‖_F · ‖H‖_F`.
pub const WITNESS: f64 = 1e-6;

/// Default evaluation angle for φ-dependent numerics.
pub const DEFAULT_PHI: f64 = 0.7;

/// Largest register the dense path simulates.
pub const DENSE_QUBIT_LIMIT: usize = 10;
/// Largest register the adaptive optimizer accepts.
pub const OPTIMIZER_QUBIT_LIMIT: usize = 6;
