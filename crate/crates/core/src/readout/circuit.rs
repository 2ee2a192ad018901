use super::{Povm, ReadoutError};
use crate::numerics::ComplexMatrix;
use crate::scalar::{creal, czero, Real, C};

/// Basis permutation of the CNOT cascade: qubit 0 controls a flip of every other qubit.
fn cascade_image(x: usize, n: usize) -> usize {
    let top = 1usize << (n - 1);
    if x & top != 0 {
        x ^ (top - 1)
    } else {
        x
    }
}

/// `V = Π_{i≥1} CNOT(0 → i)` as a dense permutation matrix.
pub fn cnot_cascade<T: Real>(n: usize) -> Result<ComplexMatrix<T>, ReadoutError> {
    if n == 0 {
        return Err(ReadoutError::InvalidQubitCount(0));
    }
    let dim = 1usize << n;
    Ok(ComplexMatrix::from_fn(dim, |i, j| {
        if cascade_image(j, n) == i {
            creal(T::one())
        } else {
            czero()
        }
    }))
}

/// Coherent readout of an NGHZ-type register: undo the entanglement with the
/// CNOT cascade, then measure qubit 0 in `|±⟩` and the rest in the
/// computational basis. Elements are `V†(|s⟩⟨s| ⊗ |r⟩⟨r|)V`, ordered with
/// `s ∈ {+, −}` most significant.
pub fn coherent_nghz_readout<T: Real>(n: usize) -> Result<Povm<T>, ReadoutError> {
    if n == 0 {
        return Err(ReadoutError::InvalidQubitCount(0));
    }
    let dim = 1usize << n;
    let half = dim / 2;
    let amp = creal(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let mut vectors = Vec::with_capacity(dim);
    for sign in [amp, -amp] {
        for rest in 0..half {
            // V is an involution, so V† = V.
            let mut v: Vec<C<T>> = vec![czero(); dim];
            v[cascade_image(rest, n)] = amp;
            v[cascade_image(half + rest, n)] = sign;
            vectors.push(v);
        }
    }
    Ok(Povm::from_vectors(vectors)?)
}
