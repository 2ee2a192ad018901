//! Probe states and the phase-encoded family `φ ↦ ρ_φ`.

mod descriptor;

pub use descriptor::{matrix_to_raw, raw_to_matrix, GeneratorSpec, RawMatrix, StateDescriptor, StateKind};

use thiserror::Error;

use crate::numerics::{
    hermitian_eig, partial_trace, tensor_all, unitary_from_eigensystem, ComplexMatrix, HermitianEigensystem,
    NumericsError, Sign,
};
use crate::scalar::{cis, cplx, creal, czero, Real, C};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("qubit count must be at least 1, got {0}")]
    InvalidQubitCount(usize),
    #[error("signal strength must lie in [0, 1], got {0}")]
    InvalidEta(f64),
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("invalid classical table: {0}")]
    BadTable(String),
    #[error("generator dimension {generator} does not match state dimension {state}")]
    DimMismatch { state: usize, generator: usize },
    #[error("invalid state descriptor: {0}")]
    Descriptor(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Qubit-register density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    mat: ComplexMatrix<T>,
    qubits: usize,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates and wraps a matrix of dimension `2^N`.
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self, ProbeError> {
        let qubits = qubit_count(mat.dim())
            .ok_or_else(|| ProbeError::NotDensityMatrix(format!("dimension {} is not a power of two", mat.dim())))?;
        if !mat.is_hermitian(T::tol(tol::HERMITIAN)) {
            return Err(ProbeError::NotDensityMatrix("not Hermitian".into()));
        }
        let tr = mat.trace();
        if (tr - creal(T::one())).norm() > T::tol(tol::TRACE) {
            return Err(ProbeError::NotDensityMatrix(format!("trace {} ≠ 1", tr.re)));
        }
        let min = hermitian_eig(&mat)?.min_eigenvalue();
        if min < -T::tol(tol::PSD_EIGENVALUE) {
            return Err(ProbeError::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            mat: mat.hermitian_part(),
            qubits,
        })
    }

    /// Wraps a matrix already known to be a valid state.
    pub(crate) fn from_trusted(mat: ComplexMatrix<T>) -> Self {
        let qubits = qubit_count(mat.dim()).expect("register dimension is a power of two");
        Self { mat, qubits }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> T {
        self.mat.trace_of_product(&self.mat).re
    }

    pub fn eigensystem(&self) -> Result<HermitianEigensystem<T>, ProbeError> {
        Ok(hermitian_eig(&self.mat)?)
    }

    /// Reduced state on the listed qubits (0 = most significant).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix<T>, ProbeError> {
        let dims = vec![2; self.qubits];
        Ok(Self::from_trusted(partial_trace(&self.mat, &dims, keep)?))
    }

    pub fn cast<U: Real>(&self) -> DensityMatrix<U> {
        DensityMatrix {
            mat: self.mat.cast(),
            qubits: self.qubits,
        }
    }
}

fn qubit_count(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

/// Werner-type probe: `n_qubits` qubits with signal strength `eta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WernerSpec<T: Real> {
    pub n_qubits: usize,
    pub eta: T,
}

impl<T: Real> WernerSpec<T> {
    pub fn new(n_qubits: usize, eta: T) -> Result<Self, ProbeError> {
        let spec = Self { n_qubits, eta };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), ProbeError> {
        if self.n_qubits == 0 {
            return Err(ProbeError::InvalidQubitCount(0));
        }
        if !(self.eta >= T::zero() && self.eta <= T::one()) {
            return Err(ProbeError::InvalidEta(self.eta.as_f64()));
        }
        Ok(())
    }
}

/// `(|0…0⟩ + |1…1⟩)/√2` as a state vector.
pub fn ghz_vector<T: Real>(n: usize) -> Vec<C<T>> {
    let dim = 1usize << n;
    let mut v = vec![czero(); dim];
    let a = creal(T::FRAC_1_SQRT_2());
    v[0] = a;
    v[dim - 1] += a;
    v
}

/// N-qubit GHZ projector.
pub fn nghz<T: Real>(n: usize) -> Result<DensityMatrix<T>, ProbeError> {
    if n == 0 {
        return Err(ProbeError::InvalidQubitCount(0));
    }
    Ok(DensityMatrix::from_trusted(ComplexMatrix::projector(&ghz_vector(n))))
}

/// Bell pair `(|00⟩ + |11⟩)/√2`.
pub fn bell00<T: Real>() -> DensityMatrix<T> {
    nghz(2).expect("two qubits")
}

/// `(1 − η) I/2^N + η |G^N⟩⟨G^N|`.
pub fn werner<T: Real>(spec: &WernerSpec<T>) -> Result<DensityMatrix<T>, ProbeError> {
    spec.validate()?;
    let n = spec.n_qubits;
    let dim = 1usize << n;
    let noise = (T::one() - spec.eta) / T::lit(dim as f64);
    let mut m = ComplexMatrix::identity(dim).scale_real(noise);
    let g = ComplexMatrix::projector(&ghz_vector::<T>(n)).scale_real(spec.eta);
    m += &g;
    Ok(DensityMatrix::from_trusted(m))
}

/// `Σ_i |1⟩⟨1|_i`: the collective phase generator, diagonal with the Hamming
/// weight of each computational basis state.
pub fn collective_generator<T: Real>(n: usize) -> ComplexMatrix<T> {
    let weights: Vec<T> = (0..1usize << n).map(|i| T::lit(i.count_ones() as f64)).collect();
    ComplexMatrix::from_real_diagonal(&weights)
}

/// Joint distribution over qubit outcomes together with one orthonormal
/// basis per qubit; outcome index bit `k` (most significant first) selects
/// the column of `local_bases[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalTable<T: Real> {
    n_qubits: usize,
    probs: Vec<T>,
    local_bases: Vec<ComplexMatrix<T>>,
}

impl<T: Real> ClassicalTable<T> {
    /// Table in the computational basis of every qubit.
    pub fn new(n_qubits: usize, probs: Vec<T>) -> Result<Self, ProbeError> {
        Self::with_local_bases(n_qubits, probs, vec![ComplexMatrix::identity(2); n_qubits])
    }

    pub fn with_local_bases(
        n_qubits: usize,
        probs: Vec<T>,
        local_bases: Vec<ComplexMatrix<T>>,
    ) -> Result<Self, ProbeError> {
        if n_qubits == 0 {
            return Err(ProbeError::InvalidQubitCount(0));
        }
        if probs.len() != 1 << n_qubits {
            return Err(ProbeError::BadTable(format!(
                "{} probabilities for {} qubits",
                probs.len(),
                n_qubits
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= T::zero())) {
            return Err(ProbeError::BadTable(format!("negative or NaN probability {p}")));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(tol::TABLE_SUM) {
            return Err(ProbeError::BadTable(format!("probabilities sum to {total}")));
        }
        if local_bases.len() != n_qubits {
            return Err(ProbeError::BadTable(format!(
                "{} local bases for {} qubits",
                local_bases.len(),
                n_qubits
            )));
        }
        for (k, b) in local_bases.iter().enumerate() {
            let defect = if b.dim() == 2 {
                b.adjoint().matmul(b).max_abs_diff(&ComplexMatrix::identity(2))
            } else {
                T::infinity()
            };
            if defect > T::tol(1e-10) {
                return Err(ProbeError::BadTable(format!("local basis {k} is not a 2×2 unitary")));
            }
        }
        Ok(Self {
            n_qubits,
            probs,
            local_bases,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn local_bases(&self) -> &[ComplexMatrix<T>] {
        &self.local_bases
    }

    /// The product basis `⊗_k B_k`, one column per joint outcome.
    pub fn product_basis(&self) -> ComplexMatrix<T> {
        tensor_all(&self.local_bases)
    }
}

/// `Σ_x q(x) |x⟩⟨x|` in the table's product basis.
pub fn classically_correlated<T: Real>(table: &ClassicalTable<T>) -> DensityMatrix<T> {
    let w = table.product_basis();
    let diag = ComplexMatrix::from_real_diagonal(&table.probs);
    DensityMatrix::from_trusted(diag.conjugate_by(&w).hermitian_part())
}

/// Complete dephasing in a product basis: `Σ_x P_x ρ P_x`. Classically
/// correlated states are exactly its fixed points.
pub fn dephase_in_product_basis<T: Real>(rho: &ComplexMatrix<T>, basis: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let in_basis = basis.adjoint().matmul(rho).matmul(basis);
    let diag: Vec<C<T>> = in_basis.diagonal();
    let d = ComplexMatrix::from_fn(rho.dim(), |i, j| if i == j { diag[i] } else { czero() });
    d.conjugate_by(basis)
}

/// Initial state plus a Hermitian generator `H`: `ρ_φ = e^{sign·iHφ} ρ e^{−sign·iHφ}`.
#[derive(Clone, Debug)]
pub struct ProbeFamily<T: Real> {
    initial: DensityMatrix<T>,
    generator: ComplexMatrix<T>,
    sign: Sign,
    spectrum: HermitianEigensystem<T>,
    diagonal: Option<Vec<T>>,
}

impl<T: Real> ProbeFamily<T> {
    pub fn new(initial: DensityMatrix<T>, generator: ComplexMatrix<T>, sign: Sign) -> Result<Self, ProbeError> {
        if generator.dim() != initial.dim() {
            return Err(ProbeError::DimMismatch {
                state: initial.dim(),
                generator: generator.dim(),
            });
        }
        let spectrum = hermitian_eig(&generator)?;
        let generator = generator.hermitian_part();
        let n = generator.dim();
        let is_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || generator[(i, j)] == czero()));
        let diagonal = is_diagonal.then(|| generator.diagonal().iter().map(|z| z.re).collect());
        Ok(Self {
            initial,
            generator,
            sign,
            spectrum,
            diagonal,
        })
    }

    /// Family encoded by the collective phase generator `Σ_i |1⟩⟨1|_i` with sign `+1`.
    pub fn collective(initial: DensityMatrix<T>) -> Self {
        let generator = collective_generator(initial.qubits());
        Self::new(initial, generator, Sign::Plus).expect("collective generator is diagonal")
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn initial(&self) -> &DensityMatrix<T> {
        &self.initial
    }

    pub fn generator(&self) -> &ComplexMatrix<T> {
        &self.generator
    }

    pub fn generator_spectrum(&self) -> &HermitianEigensystem<T> {
        &self.spectrum
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn qubits(&self) -> usize {
        self.initial.qubits()
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    /// `U_φ = e^{sign·iHφ}`.
    pub fn unitary(&self, phi: T) -> ComplexMatrix<T> {
        match &self.diagonal {
            Some(h) => {
                let s = self.sign.value::<T>() * phi;
                let phases: Vec<C<T>> = h.iter().map(|&x| cis(s * x)).collect();
                ComplexMatrix::from_fn(h.len(), |i, j| if i == j { phases[i] } else { czero() })
            }
            None => unitary_from_eigensystem(&self.spectrum, phi, self.sign),
        }
    }

    pub fn cast<U: Real>(&self) -> ProbeFamily<U> {
        ProbeFamily::new(self.initial.cast(), self.generator.cast(), self.sign).expect("casting preserves validity")
    }
}

/// `ρ_φ = U_φ ρ U_φ†`.
pub fn encode<T: Real>(family: &ProbeFamily<T>, phi: T) -> DensityMatrix<T> {
    if phi == T::zero() {
        return family.initial.clone();
    }
    let rho = family.initial.matrix();
    let mat = match &family.diagonal {
        Some(h) => {
            let s = family.sign.value::<T>() * phi;
            ComplexMatrix::from_fn(rho.dim(), |i, j| rho[(i, j)] * cis(s * (h[i] - h[j])))
        }
        None => rho.conjugate_by(&family.unitary(phi)).hermitian_part(),
    };
    DensityMatrix::from_trusted(mat)
}

/// `∂_φ ρ_φ = sign · i [H, ρ_φ]`.
pub fn d_rho_d_phi<T: Real>(family: &ProbeFamily<T>, phi: T) -> ComplexMatrix<T> {
    let rho_phi = encode(family, phi);
    derivative_at(family, &rho_phi)
}

/// Derivative of the family at an already encoded state.
pub(crate) fn derivative_at<T: Real>(family: &ProbeFamily<T>, rho_phi: &DensityMatrix<T>) -> ComplexMatrix<T> {
    let rho = rho_phi.matrix();
    let factor = cplx(T::zero(), family.sign.value::<T>());
    match &family.diagonal {
        Some(h) => ComplexMatrix::from_fn(rho.dim(), |i, j| rho[(i, j)] * factor * (h[i] - h[j])),
        None => family.generator.commutator(rho).scale(factor).hermitian_part(),
    }
}

#[cfg(test)]
mod tests;
