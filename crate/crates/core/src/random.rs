//! Seeded random instances (Hermitian matrices, unitaries, states, POVMs,
//! outcome distributions) for property checks and sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::ComplexMatrix;
use crate::scalar::{cplx, Real, C};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller; good enough for test-instance generation.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn complex_gaussian<T: Real, R: Rng>(rng: &mut R) -> C<T> {
    cplx(T::lit(gaussian(rng)), T::lit(gaussian(rng)))
}

/// Matrix with i.i.d. complex Gaussian entries.
pub fn ginibre<T: Real, R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// `B + B†` for a Ginibre `B`.
pub fn hermitian<T: Real, R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let b = ginibre::<T, R>(rng, dim);
    &b + &b.adjoint()
}

/// Haar-like unitary from Gram–Schmidt on a Ginibre matrix.
pub fn unitary<T: Real, R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let cols = orthonormal_columns(&ginibre::<T, R>(rng, dim), dim);
    ComplexMatrix::from_columns(&cols)
}

/// Orthonormalizes the first `count` columns of `m` (modified Gram–Schmidt).
pub(crate) fn orthonormal_columns<T: Real>(m: &ComplexMatrix<T>, count: usize) -> Vec<Vec<C<T>>> {
    let mut out: Vec<Vec<C<T>>> = Vec::with_capacity(count);
    for j in 0..count {
        let mut v = m.column(j);
        for u in &out {
            let proj: C<T> = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for vi in &mut v {
            *vi /= norm;
        }
        out.push(v);
    }
    out
}

/// Full-rank density matrix `G G† / tr(G G†)`.
pub fn density<T: Real, R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let g = ginibre::<T, R>(rng, dim);
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    rho.scale_real(T::one() / tr).hermitian_part()
}

/// Random POVM with `outcomes` elements: `S^{-1/2} A_k S^{-1/2}` with
/// `A_k = G_k G_k†` and `S = Σ A_k`.
pub fn povm_elements<T: Real, R: Rng>(rng: &mut R, dim: usize, outcomes: usize) -> Vec<ComplexMatrix<T>> {
    let raw: Vec<ComplexMatrix<T>> = (0..outcomes)
        .map(|_| {
            let g = ginibre::<T, R>(rng, dim);
            g.matmul(&g.adjoint())
        })
        .collect();
    let mut total = ComplexMatrix::zeros(dim);
    for a in &raw {
        total += a;
    }
    let eig = crate::numerics::hermitian_eig(&total.hermitian_part()).expect("sum of PSD matrices is Hermitian");
    let inv_sqrt = eig.map_spectrum(|l| C::from(T::one() / l.sqrt()));
    raw.iter().map(|a| a.conjugate_by(&inv_sqrt).hermitian_part()).collect()
}

/// Random probability vector (normalized uniform weights, strictly positive).
pub fn probability_vector<T: Real, R: Rng>(rng: &mut R, len: usize) -> Vec<T> {
    let w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| T::lit(x / s)).collect()
}

/// A smooth φ-family of strictly positive distributions over `len` outcomes:
/// `p_x(φ) ∝ exp(a_x + b_x sin(φ + c_x))`, returned with its exact derivative.
pub fn parameterized_distribution<T: Real, R: Rng>(rng: &mut R, len: usize, phi: f64) -> (Vec<T>, Vec<T>) {
    let coeffs: Vec<(f64, f64, f64)> = (0..len)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let logits: Vec<f64> = coeffs.iter().map(|(a, b, c)| a + b * (phi + c).sin()).collect();
    let dlogits: Vec<f64> = coeffs.iter().map(|(_, b, c)| b * (phi + c).cos()).collect();
    let w: Vec<f64> = logits.iter().map(|l| l.exp()).collect();
    let z: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| x / z).collect();
    let mean_d: f64 = p.iter().zip(&dlogits).map(|(pi, di)| pi * di).sum();
    let dp: Vec<f64> = p.iter().zip(&dlogits).map(|(pi, di)| pi * (di - mean_d)).collect();
    (
        p.into_iter().map(T::lit).collect(),
        dp.into_iter().map(T::lit).collect(),
    )
}
