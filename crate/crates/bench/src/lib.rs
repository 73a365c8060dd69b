//! Inputs shared by the benchmarks.

use qmarg::{ComplexMatrix, GaussianSource};

/// Seeded random Hermitian matrix of size `n`.
pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let g = GaussianSource::new(seed).ginibre(n, n);
    (&g + &g.adjoint()).scale(0.5)
}
