//! Dense complex linear algebra: Hermitian eigensolver, Kronecker products,
//! partial traces and spectral matrix functions.

mod eig;
mod matrix;
mod ops;

pub use eig::{hermitian_eig, HermitianEigensystem};
pub use matrix::ComplexMatrix;
pub use ops::{
    partial_trace, psd_sqrt, psd_sqrt_of, tensor, tensor_all, tensor_vec, unitary_from_eigensystem,
    unitary_from_generator, Sign,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian: ‖A − A†‖_F = {defect:e} for ‖A‖_F = {norm:e}")]
    NotHermitian { defect: f64, norm: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("subsystem selection {keep:?} invalid for {count} subsystems")]
    BadSubsystems { keep: Vec<usize>, count: usize },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("expected {expected} entries, found {found}")]
    BadShape { expected: usize, found: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

#[cfg(test)]
mod tests;
