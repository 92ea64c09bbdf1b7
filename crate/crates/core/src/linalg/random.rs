//! Seeded sampling of Haar unitaries and random states.
//!
//! Every sampler takes its generator explicitly; the `*_seeded` helpers build a
//! fresh [`ChaCha8Rng`] so that a `(n, seed)` pair always yields the same matrix.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::scalar::{modulus, Complex, Real};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n x n` matrix of i.i.d. standard complex Gaussians (real and imaginary
/// parts each of variance 1/2).
pub fn ginibre<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * s), T::lit(im * s))
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` pushed into the columns of `Q`.
pub fn haar_unitary_with<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    assert!(n >= 1, "Haar unitary needs n >= 1");
    let g = ginibre::<T, R>(n, rng).to_nalgebra();
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let m = modulus(d);
        let phase = if m > T::zero() {
            d / Complex::new(m, T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(&q)
}

/// Deterministic Haar sample for a fixed `(n, seed)`.
pub fn haar_unitary<T: Real>(n: usize, seed: u64) -> ComplexMatrix<T> {
    haar_unitary_with(n, &mut rng_from_seed(seed))
}

/// Random full-rank density matrix `G G* / Tr(G G*)` with `G` Ginibre.
pub fn random_density<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ginibre::<T, R>(n, rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.hermitian_part().scale_real(T::one() / tr)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    ginibre::<T, R>(n, rng).hermitian_part()
}

/// Random probability vector with entries bounded away from zero,
/// sorted in strictly decreasing order.
pub fn random_spectrum<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    w.sort_by(|a, b| b.partial_cmp(a).unwrap());
    w.dedup();
    while w.len() < n {
        let x = w[w.len() - 1] * 0.5;
        w.push(x);
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| T::lit(x / total)).collect()
}
