//! Seeded random operators for fixtures and property tests.
//!
//! All generators draw from [`SplitMix64`], a 64-bit-state generator with a
//! fixed published algorithm, so a seed reproduces the same operators on every
//! platform.

use nalgebra::linalg::QR;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
pub use rand_xoshiro::SplitMix64;

use crate::linalg::{CMatrix, HermitianOperator, PositiveOperator, PsdOperator};

/// Weight of the maximally mixed component in [`random_positive`].
const MIXING: f64 = 0.1;

pub fn seeded(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// GUE-distributed Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOperator {
    let g = ginibre(n, n, rng);
    HermitianOperator::from_computed(&g)
}

/// Unit-trace positive definite state `(1 - t) W / tr W + t I / n` with `W` Wishart
/// and `t = 0.1`, which keeps the smallest eigenvalue at least `0.1 / n`.
pub fn random_positive<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PositiveOperator {
    let g = ginibre(n, n, rng);
    let w = HermitianOperator::from_computed(&(&g * g.adjoint()));
    let w = w.scale((1.0 - MIXING) / w.trace());
    let mixed = HermitianOperator::identity(n).scale(MIXING / n as f64);
    PositiveOperator::new(&w + &mixed).expect("mixture with the identity is positive definite")
}

/// Haar-random unitary via QR of a Ginibre matrix with the phases of `R` removed.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = QR::new(ginibre(n, n, rng));
    let q = qr.q();
    let r = qr.r();
    CMatrix::from_fn(n, n, |row, c| {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        q[(row, c)] * phase
    })
}

/// Unit-trace state of the given rank whose nonzero eigenvalues lie in `[0.2, 1]`
/// before normalization, rotated by a Haar-random unitary.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> PsdOperator {
    assert!(rank <= n, "rank {rank} exceeds dimension {n}");
    let mut values: Vec<f64> = (0..n)
        .map(|i| if i < rank { rng.random_range(0.2..1.0) } else { 0.0 })
        .collect();
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        values.iter_mut().for_each(|v| *v /= total);
    }
    let u = random_unitary(n, rng);
    let d = HermitianOperator::diagonal(&values);
    PsdOperator::new(d.conjugate_by(&u)).expect("conjugated diagonal state is PSD")
}
