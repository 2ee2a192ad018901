//! Measurements: POVMs, the CNOT-cascade coherent readout, and sequential
//! local measurements with classical feed-forward.

mod adaptive;
mod circuit;
mod optimize;
mod policy;

pub use adaptive::{run_adaptive, AdaptiveOutcome, Branch};
pub use circuit::{cnot_cascade, coherent_nghz_readout};
pub use optimize::{optimize_adaptive, OptimizeConfig, OptimizeResult};
pub use policy::{history_key, paper_policy, paper_policy_at, AdaptivePolicy, Correction, Decision, LocalBasis, Pauli};

use thiserror::Error;

use crate::fisher::{FisherError, OutcomeDistribution};
use crate::numerics::{hermitian_eig, psd_sqrt, ComplexMatrix, NumericsError};
use crate::probes::{DensityMatrix, ProbeError};
use crate::scalar::{czero, Real, C};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PovmError {
    #[error("a POVM needs at least one element")]
    Empty,
    #[error("element {index} has dimension {found}, expected {expected}")]
    DimMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("element {0} is not Hermitian")]
    NotHermitian(usize),
    #[error("element {index} is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPsd { index: usize, min_eigenvalue: f64 },
    #[error("elements do not sum to the identity (max deviation {defect:e})")]
    Incomplete { defect: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReadoutError {
    #[error("qubit count must be at least 1, got {0}")]
    InvalidQubitCount(usize),
    #[error("{n} qubits exceeds the limit of {limit}")]
    TooManyQubits { n: usize, limit: usize },
    #[error("incomplete policy: {0}")]
    IncompletePolicy(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid local basis: {0}")]
    InvalidBasis(String),
    #[error("policy for {policy} qubits applied to a {state}-qubit state")]
    QubitMismatch { state: usize, policy: usize },
    #[error("dimension mismatch: state {state}, measurement {measurement}")]
    DimMismatch { state: usize, measurement: usize },
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    Fisher(#[from] FisherError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Clone, Debug, PartialEq)]
enum Element<T: Real> {
    Dense(ComplexMatrix<T>),
    /// `|v⟩⟨v|`, stored as the vector `v`.
    RankOne(Vec<C<T>>),
}

impl<T: Real> Element<T> {
    fn dim(&self) -> usize {
        match self {
            Element::Dense(m) => m.dim(),
            Element::RankOne(v) => v.len(),
        }
    }

    fn matrix(&self) -> ComplexMatrix<T> {
        match self {
            Element::Dense(m) => m.clone(),
            Element::RankOne(v) => ComplexMatrix::projector(v),
        }
    }

    /// `tr(Π A)`.
    fn expectation(&self, a: &ComplexMatrix<T>) -> C<T> {
        match self {
            Element::Dense(m) => m.trace_of_product(a),
            Element::RankOne(v) => {
                let av = a.apply(v);
                v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum()
            }
        }
    }
}

/// Positive operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm<T: Real> {
    elements: Vec<Element<T>>,
}

impl<T: Real> Povm<T> {
    /// Validates positivity and completeness of arbitrary elements.
    pub fn new(elements: Vec<ComplexMatrix<T>>) -> Result<Self, PovmError> {
        if elements.is_empty() {
            return Err(PovmError::Empty);
        }
        for (index, e) in elements.iter().enumerate() {
            if !e.is_hermitian(T::tol(tol::HERMITIAN)) {
                return Err(PovmError::NotHermitian(index));
            }
            let min = hermitian_eig(e)?.min_eigenvalue();
            if min < -T::tol(tol::PSD_EIGENVALUE) {
                return Err(PovmError::NotPsd {
                    index,
                    min_eigenvalue: min.as_f64(),
                });
            }
        }
        Self::checked(
            elements
                .into_iter()
                .map(|e| Element::Dense(e.hermitian_part()))
                .collect(),
        )
    }

    /// Rank-one elements `|v_k⟩⟨v_k|`; positivity holds by construction.
    pub fn from_vectors(vectors: Vec<Vec<C<T>>>) -> Result<Self, PovmError> {
        if vectors.is_empty() {
            return Err(PovmError::Empty);
        }
        Self::checked(vectors.into_iter().map(Element::RankOne).collect())
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_basis(basis: &ComplexMatrix<T>) -> Result<Self, PovmError> {
        Self::from_vectors((0..basis.dim()).map(|j| basis.column(j)).collect())
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![Element::Dense(ComplexMatrix::identity(dim))],
        }
    }

    /// Projective measurement of every qubit in the computational basis.
    pub fn computational(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let elements = (0..dim)
            .map(|k| {
                let mut v = vec![czero(); dim];
                v[k] = C::new(T::one(), T::zero());
                Element::RankOne(v)
            })
            .collect();
        Self { elements }
    }

    fn checked(elements: Vec<Element<T>>) -> Result<Self, PovmError> {
        let dim = elements[0].dim();
        for (index, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(PovmError::DimMismatch {
                    index,
                    expected: dim,
                    found: e.dim(),
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(dim);
        for e in &elements {
            sum += &e.matrix();
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if !(defect <= T::tol(tol::TRACE)) {
            return Err(PovmError::Incomplete {
                defect: defect.as_f64(),
            });
        }
        Ok(Self { elements })
    }

    /// Materialized elements.
    pub fn elements(&self) -> Vec<ComplexMatrix<T>> {
        self.elements.iter().map(Element::matrix).collect()
    }

    pub fn element(&self, k: usize) -> ComplexMatrix<T> {
        self.elements[k].matrix()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// `tr(Π_k A)` without materializing rank-one elements.
    pub fn expectation(&self, k: usize, a: &ComplexMatrix<T>) -> C<T> {
        self.elements[k].expectation(a)
    }

    pub fn cast<U: Real>(&self) -> Povm<U> {
        let elements = self
            .elements
            .iter()
            .map(|e| match e {
                Element::Dense(m) => Element::Dense(m.cast()),
                Element::RankOne(v) => Element::RankOne(
                    v.iter()
                        .map(|z| C::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                        .collect(),
                ),
            })
            .collect();
        Povm { elements }
    }
}

/// `p_x = tr(Π_x ρ)`, `∂p_x = tr(Π_x ∂ρ)`; outcome `k` is labelled `[k]`.
pub fn outcome_distribution<T: Real>(
    rho: &DensityMatrix<T>,
    drho: &ComplexMatrix<T>,
    povm: &Povm<T>,
) -> Result<OutcomeDistribution<T>, FisherError> {
    if povm.dim() != rho.dim() || drho.dim() != rho.dim() {
        return Err(FisherError::DimMismatch {
            state: rho.dim(),
            measurement: povm.dim(),
        });
    }
    let prob = (0..povm.len()).map(|k| povm.expectation(k, rho.matrix()).re).collect();
    let dprob = (0..povm.len()).map(|k| povm.expectation(k, drho).re).collect();
    OutcomeDistribution::single_part(prob, dprob)
}

/// Outcome statistics plus Lüders post-measurement states.
#[derive(Clone, Debug)]
pub struct Measurement<T: Real> {
    pub distribution: OutcomeDistribution<T>,
    /// `√Π ρ √Π / p`; `None` for outcomes that never occur.
    pub post_states: Vec<Option<DensityMatrix<T>>>,
}

pub fn measure<T: Real>(
    rho: &DensityMatrix<T>,
    drho: &ComplexMatrix<T>,
    povm: &Povm<T>,
) -> Result<Measurement<T>, ReadoutError> {
    if povm.dim() != rho.dim() || drho.dim() != rho.dim() {
        return Err(ReadoutError::DimMismatch {
            state: rho.dim(),
            measurement: povm.dim(),
        });
    }
    let distribution = outcome_distribution(rho, drho, povm)?;
    let mut post_states = Vec::with_capacity(povm.len());
    for (k, &p) in distribution.prob().iter().enumerate() {
        if p <= T::lit(tol::ZERO_PROBABILITY) {
            post_states.push(None);
            continue;
        }
        let root = match &povm.elements[k] {
            Element::Dense(m) => psd_sqrt(m)?,
            Element::RankOne(v) => {
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
                ComplexMatrix::projector(v).scale_real(T::one() / norm)
            }
        };
        let post = rho
            .matrix()
            .conjugate_by(&root)
            .scale_real(T::one() / p)
            .hermitian_part();
        post_states.push(Some(DensityMatrix::from_trusted(post)));
    }
    Ok(Measurement {
        distribution,
        post_states,
    })
}
