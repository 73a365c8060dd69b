//! Seeded Gaussian sampling for random states, unitaries and Kraus families.
//!
//! The generator is ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`; normal variates come from the Box–Muller
//! transform. Both are specified bit-for-bit, so a seed produces the same
//! matrices on every platform.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::matrix::{ComplexMatrix, C64};

/// Seeded source of standard normal variates.
#[derive(Debug, Clone)]
pub struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform variate in `(0, 1]` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate (Box–Muller, both outputs used).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Complex normal with `E|z|² = 1`.
    pub fn complex_normal(&mut self) -> C64 {
        let re = self.normal();
        let im = self.normal();
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Ginibre matrix: i.i.d. complex normal entries.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    /// Random density matrix `G·G† / tr(G·G†)` with `G` a square Ginibre matrix.
    pub fn density_matrix(&mut self, dim: usize) -> ComplexMatrix {
        let g = self.ginibre(dim, dim);
        let w = &g * &g.adjoint();
        let tr = w.trace().re;
        w.scale(1.0 / tr)
    }

    /// Haar-random unitary: Gram–Schmidt on the columns of a Ginibre matrix.
    pub fn unitary(&mut self, dim: usize) -> ComplexMatrix {
        let g = self.ginibre(dim, dim);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut v = g.column_vec(j);
            for q in &cols {
                let proj = ComplexMatrix::dot(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for x in &mut v {
                *x /= norm;
            }
            cols.push(v);
        }
        ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
    }

    /// Uniformly random point of the probability simplex with `k` entries.
    pub fn probability_vector(&mut self, k: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..k).map(|_| -self.uniform().ln()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }
}
