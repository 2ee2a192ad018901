use crate::numerics::{hermitian_eig, psd_sqrt, psd_sqrt_of, ComplexMatrix, HermitianEigensystem};
use crate::probes::{derivative_at, encode, ProbeFamily};
use crate::readout::{outcome_distribution, Povm};
use crate::scalar::{cplx, czero, Real, C};
use crate::tol;

use super::{classical_fisher, FisherError};

fn support_cutoff<T: Real>(eig: &HermitianEigensystem<T>) -> T {
    T::tol(tol::SUPPORT_CUTOFF) * eig.max_eigenvalue().abs()
}

/// Optimal Fisher information over all POVMs for a unitary family:
/// `2 Σ_ij (λ_i − λ_j)² / (λ_i + λ_j) · |⟨ψ_i|H|ψ_j⟩|²`, summed over the support.
pub fn qfi<T: Real>(family: &ProbeFamily<T>, phi: T) -> Result<T, FisherError> {
    let rho = encode(family, phi);
    let eig = rho.eigensystem()?;
    let h = eig.to_eigenbasis(family.generator());
    let cutoff = support_cutoff(&eig);
    let lambda = &eig.eigenvalues;
    let two = T::lit(2.0);
    let mut f = T::zero();
    for i in 0..lambda.len() {
        for j in 0..lambda.len() {
            let s = lambda[i] + lambda[j];
            if s > cutoff {
                let diff = lambda[i] - lambda[j];
                f += two * diff * diff / s * h[(i, j)].norm_sqr();
            }
        }
    }
    Ok(f)
}

/// QFI of an arbitrary state curve from `ρ` and `∂ρ`: `2 Σ_ij |(∂ρ)_ij|² / (λ_i + λ_j)`
/// in the eigenbasis of `ρ`. Works for unnormalized derivatives of
/// conditional states, where no generator is available.
pub fn state_qfi<T: Real>(rho: &ComplexMatrix<T>, drho: &ComplexMatrix<T>) -> Result<T, FisherError> {
    let eig = hermitian_eig(rho)?;
    let d = eig.to_eigenbasis(drho);
    let cutoff = support_cutoff(&eig);
    let lambda = &eig.eigenvalues;
    let two = T::lit(2.0);
    let mut f = T::zero();
    for i in 0..lambda.len() {
        for j in 0..lambda.len() {
            let s = lambda[i] + lambda[j];
            if s > cutoff {
                f += two * d[(i, j)].norm_sqr() / s;
            }
        }
    }
    Ok(f)
}

/// Symmetric logarithmic derivative `L` with `∂ρ = (ρL + Lρ)/2` on the support of `ρ`.
#[derive(Clone, Debug)]
pub struct SldResult<T: Real> {
    pub l: ComplexMatrix<T>,
    /// Number of eigenvalues of `ρ` above the support cutoff.
    pub support_dim: usize,
    /// Number of eigenvalue pairs `(i, j)` entering the construction.
    pub retained_pairs: usize,
    /// `‖∂ρ − (ρL + Lρ)/2‖_F`.
    pub residual: T,
}

pub fn sld_of<T: Real>(rho: &ComplexMatrix<T>, drho: &ComplexMatrix<T>) -> Result<SldResult<T>, FisherError> {
    let eig = hermitian_eig(rho)?;
    let d = eig.to_eigenbasis(drho);
    let cutoff = support_cutoff(&eig);
    let lambda = &eig.eigenvalues;
    let n = lambda.len();
    let mut retained_pairs = 0;
    let mut l_eig = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let s = lambda[i] + lambda[j];
            if s > cutoff {
                l_eig[(i, j)] = d[(i, j)] * (T::lit(2.0) / s);
                retained_pairs += 1;
            }
        }
    }
    let l = eig.from_eigenbasis(&l_eig).hermitian_part();
    let relation = rho.anticommutator(&l).scale_real(T::lit(0.5));
    let residual = (drho - &relation).frobenius_norm();
    Ok(SldResult {
        l,
        support_dim: lambda.iter().filter(|&&x| x > cutoff).count(),
        retained_pairs,
        residual,
    })
}

pub fn sld<T: Real>(family: &ProbeFamily<T>, phi: T) -> Result<SldResult<T>, FisherError> {
    let rho = encode(family, phi);
    let drho = derivative_at(family, &rho);
    sld_of(rho.matrix(), &drho)
}

/// Rank-one projectors onto an eigenbasis of the SLD.
pub fn sld_povm<T: Real>(sld: &SldResult<T>) -> Result<Povm<T>, FisherError> {
    let eig = hermitian_eig(&sld.l)?;
    Ok(Povm::from_basis(&eig.eigenvectors)?)
}

/// Classical Fisher information of `p_φ(x) = tr(ρ_φ Π_x)`.
pub fn povm_fisher<T: Real>(family: &ProbeFamily<T>, phi: T, povm: &Povm<T>) -> Result<T, FisherError> {
    if povm.dim() != family.dim() {
        return Err(FisherError::DimMismatch {
            state: family.dim(),
            measurement: povm.dim(),
        });
    }
    let rho = encode(family, phi);
    let drho = derivative_at(family, &rho);
    let dist = outcome_distribution(&rho, &drho, povm)?;
    classical_fisher(&dist)
}

/// Per-element test of `Π^{1/2} L ρ^{1/2} = k Π^{1/2} ρ^{1/2}` with real `k`.
#[derive(Clone, Debug)]
pub struct OptimalityReport<T: Real> {
    pub residuals: Vec<T>,
    pub k: Vec<T>,
    pub tolerance: T,
    pub optimal: bool,
}

impl<T: Real> OptimalityReport<T> {
    pub fn max_residual(&self) -> T {
        self.residuals.iter().copied().fold(T::zero(), T::max)
    }
}

/// Checks the optimal-measurement condition element by element. `k_x` is the
/// real part of the complex least-squares coefficient; whatever the
/// imaginary part fails to explain stays in the residual.
pub fn optimality_check<T: Real>(
    family: &ProbeFamily<T>,
    phi: T,
    povm: &Povm<T>,
) -> Result<OptimalityReport<T>, FisherError> {
    if povm.dim() != family.dim() {
        return Err(FisherError::DimMismatch {
            state: family.dim(),
            measurement: povm.dim(),
        });
    }
    let rho = encode(family, phi);
    let drho = derivative_at(family, &rho);
    let sld = sld_of(rho.matrix(), &drho)?;
    let rho_sqrt = psd_sqrt_of(&rho.eigensystem()?)?;
    let l_rho = sld.l.matmul(&rho_sqrt);

    let mut residuals = Vec::with_capacity(povm.len());
    let mut ks = Vec::with_capacity(povm.len());
    for element in &povm.elements() {
        let pi_sqrt = psd_sqrt(element)?;
        let a = pi_sqrt.matmul(&l_rho);
        let b = pi_sqrt.matmul(&rho_sqrt);
        let bb = b.inner(&b).re;
        let k = if bb > T::zero() {
            (b.inner(&a) / bb).re
        } else {
            T::zero()
        };
        residuals.push((&a - &b.scale_real(k)).frobenius_norm());
        ks.push(k);
    }
    let tolerance = T::tol(tol::OPTIMALITY) * rho_sqrt.frobenius_norm();
    let optimal = residuals.iter().all(|&r| r < tolerance);
    Ok(OptimalityReport {
        residuals,
        k: ks,
        tolerance,
        optimal,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessVerdict {
    /// Full rank and `[L₀, H] ≠ iF·I`: no φ-independent optimal measurement.
    NoGloballyOptimalMeasurement,
    /// The commutator condition holds (only possible when `F = 0`).
    ConditionSatisfied,
    /// `ρ_φ` is rank-deficient, so the argument does not apply.
    Inconclusive,
}

/// Finite-dimensional certificate against globally optimal measurements,
/// built from the Heisenberg-picture SLD `L₀ = U_φ† L_φ U_φ`.
#[derive(Clone, Debug)]
pub struct WitnessReport<T: Real> {
    /// `tr [L₀, H]`; vanishes by cyclicity of the trace.
    pub commutator_trace: C<T>,
    /// `tr(iF·I) = i·F·dim`.
    pub target_trace: C<T>,
    /// `‖[L₀, H] − iF·I‖_F`.
    pub residual: T,
    /// `‖[L₀, H]‖_F`.
    pub commutator_norm: T,
    /// `‖L₀‖_F · ‖H‖_F`.
    pub scale: T,
    pub qfi: T,
    pub full_rank: bool,
    pub verdict: WitnessVerdict,
}

pub fn global_optimality_witness<T: Real>(family: &ProbeFamily<T>, phi: T) -> Result<WitnessReport<T>, FisherError> {
    let rho = encode(family, phi);
    let eig = rho.eigensystem()?;
    let drho = derivative_at(family, &rho);
    let sld = sld_of(rho.matrix(), &drho)?;
    let u = family.unitary(phi);
    let l0 = u.adjoint().matmul(&sld.l).matmul(&u);
    let h = family.generator();
    let comm = l0.commutator(h);
    let f = qfi(family, phi)?;

    let n = comm.dim();
    let i_f = cplx(T::zero(), f);
    let target = ComplexMatrix::from_fn(n, |i, j| if i == j { i_f } else { czero() });
    let residual = (&comm - &target).frobenius_norm();
    let scale = l0.frobenius_norm() * h.frobenius_norm();
    let full_rank = eig.min_eigenvalue() > support_cutoff(&eig);
    let verdict = if !full_rank {
        WitnessVerdict::Inconclusive
    } else if residual > T::tol(tol::WITNESS) * scale {
        WitnessVerdict::NoGloballyOptimalMeasurement
    } else {
        WitnessVerdict::ConditionSatisfied
    };
    Ok(WitnessReport {
        commutator_trace: comm.trace(),
        target_trace: i_f * T::lit(n as f64),
        residual,
        commutator_norm: comm.frobenius_norm(),
        scale,
        qfi: f,
        full_rank,
        verdict,
    })
}
