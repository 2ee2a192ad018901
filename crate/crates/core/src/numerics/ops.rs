use serde::{Deserialize, Serialize};

use crate::scalar::{cis, creal, czero, Real};
use crate::tol;

use super::{hermitian_eig, ComplexMatrix, HermitianEigensystem, NumericsError};

/// Orientation of a phase encoding `U = exp(sign · i φ H)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Kronecker product `A ⊗ B`.
pub fn tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (na, nb) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(na * nb, |i, j| a[(i / nb, j / nb)] * b[(i % nb, j % nb)])
}

/// Left-folded Kronecker product of a list of factors.
pub fn tensor_all<T: Real>(factors: &[ComplexMatrix<T>]) -> ComplexMatrix<T> {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, f| tensor(&acc, f))
}

/// Kronecker product of state vectors.
pub fn tensor_vec<T: Real>(a: &[crate::C<T>], b: &[crate::C<T>]) -> Vec<crate::C<T>> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Reduces `a` on subsystems of sizes `dims` to the subsystems listed in `keep`.
///
/// Kept subsystems appear in their original order; `keep` may be empty, in
/// which case the result is the 1×1 matrix `[tr a]`.
pub fn partial_trace<T: Real>(
    a: &ComplexMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix<T>, NumericsError> {
    let total: usize = dims.iter().product();
    if total != a.dim() {
        return Err(NumericsError::DimMismatch {
            expected: a.dim(),
            found: total,
        });
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(NumericsError::BadSubsystems {
            keep: keep.to_vec(),
            count: dims.len(),
        });
    }

    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();
    let offsets = |subsystems: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &k in subsystems {
            let (size, stride) = (dims[k], strides[k]);
            out = out
                .iter()
                .flat_map(|&base| (0..size).map(move |d| base + d * stride))
                .collect();
        }
        out
    };
    let kept_off = offsets(&keep_sorted);
    let traced_off = offsets(&traced);

    let dk = kept_off.len();
    let mut out = ComplexMatrix::zeros(dk);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            let mut acc = czero();
            for &t in &traced_off {
                acc += a[(ro + t, co + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// `exp(sign · i · φ · H)` through the spectral decomposition of `H`.
pub fn unitary_from_generator<T: Real>(
    h: &ComplexMatrix<T>,
    phi: T,
    sign: Sign,
) -> Result<ComplexMatrix<T>, NumericsError> {
    let eig = hermitian_eig(h)?;
    Ok(unitary_from_eigensystem(&eig, phi, sign))
}

/// Same as [`unitary_from_generator`] for an already diagonalized generator.
pub fn unitary_from_eigensystem<T: Real>(eig: &HermitianEigensystem<T>, phi: T, sign: Sign) -> ComplexMatrix<T> {
    let s = sign.value::<T>() * phi;
    eig.map_spectrum(|l| cis(s * l))
}

/// Principal square root of a positive-semidefinite matrix.
///
/// Eigenvalues in `[−tol, 0)` are clamped to zero.
pub fn psd_sqrt<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, NumericsError> {
    let eig = hermitian_eig(a)?;
    psd_sqrt_of(&eig)
}

pub fn psd_sqrt_of<T: Real>(eig: &HermitianEigensystem<T>) -> Result<ComplexMatrix<T>, NumericsError> {
    let floor = -T::tol(tol::PSD_EIGENVALUE) * eig.max_eigenvalue().abs().max(T::one());
    let min = eig.min_eigenvalue();
    if min < floor {
        return Err(NumericsError::NotPsd {
            min_eigenvalue: min.as_f64(),
        });
    }
    Ok(eig.map_spectrum(|l| creal(l.max(T::zero()).sqrt())))
}
