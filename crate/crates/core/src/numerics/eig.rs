use crate::scalar::{Real, C};
use crate::tol;

use super::{ComplexMatrix, NumericsError};

/// Spectral decomposition `A = V Λ V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigensystem<T: Real> {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<T>,
    /// Unitary whose `i`-th column is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigensystem<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C<T>> {
        self.eigenvectors.column(i)
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    /// `V f(Λ) V†` for a complex-valued spectral function.
    pub fn map_spectrum(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<C<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum())
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map_spectrum(C::from)
    }

    /// `V† A V`: an operator expressed in this eigenbasis.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.eigenvectors.adjoint().matmul(a).matmul(&self.eigenvectors)
    }

    /// `V A V†`: an operator given in this eigenbasis mapped back.
    pub fn from_eigenbasis(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.eigenvectors.matmul(a).matmul(&self.eigenvectors.adjoint())
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the real symmetric Jacobi rotation, so the
/// diagonal stays real throughout.
pub fn hermitian_eig<T: Real>(a: &ComplexMatrix<T>) -> Result<HermitianEigensystem<T>, NumericsError> {
    let n = a.dim();
    let norm = a.frobenius_norm();
    let defect = a.hermiticity_defect();
    if defect > T::tol(tol::HERMITIAN) * norm {
        return Err(NumericsError::NotHermitian {
            defect: defect.as_f64(),
            norm: norm.as_f64(),
        });
    }

    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(n);
    let threshold = T::tol(tol::JACOBI_OFF_DIAGONAL) * norm;
    let skip = threshold / T::lit((100 * n.max(1)) as f64);

    let mut converged = norm == T::zero() || n == 1;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        if sweeps == tol::JACOBI_MAX_SWEEPS {
            return Err(NumericsError::NoConvergence {
                sweeps,
                off_diagonal: off_diagonal_norm(&m).as_f64(),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let g = apq.norm();
                if g <= skip {
                    continue;
                }
                rotate(&mut m, &mut v, p, q, apq, g);
            }
        }
        sweeps += 1;
    }
    debug_assert!(converged);

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    let n = m.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate<T: Real>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize, apq: C<T>, g: T) {
    let n = m.dim();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / g;
    let tau = (aqq - app) / (T::lit(2.0) * g);
    let t = if tau == T::zero() {
        T::one()
    } else {
        tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-iα}, c e^{-iα}]] on the (p, q) plane.
    let phase_conj = phase.conj();
    let g_qp = -phase_conj * s;
    let g_qq = phase_conj * c;

    for k in 0..n {
        let kp = m[(k, p)];
        let kq = m[(k, q)];
        m[(k, p)] = kp * c + kq * g_qp;
        m[(k, q)] = kp * s + kq * g_qq;
    }
    // Rows: G† = [[c, -s e^{iα}], [s, c e^{iα}]].
    let h_pq = -phase * s;
    let h_qq = phase * c;
    for k in 0..n {
        let pk = m[(p, k)];
        let qk = m[(q, k)];
        m[(p, k)] = pk * c + qk * h_pq;
        m[(q, k)] = pk * s + qk * h_qq;
    }
    m[(p, q)] = C::new(T::zero(), T::zero());
    m[(q, p)] = C::new(T::zero(), T::zero());
    m[(p, p)] = C::new(app - t * g, T::zero());
    m[(q, q)] = C::new(aqq + t * g, T::zero());

    for k in 0..n {
        let kp = v[(k, p)];
        let kq = v[(k, q)];
        v[(k, p)] = kp * c + kq * g_qp;
        v[(k, q)] = kp * s + kq * g_qq;
    }
}
