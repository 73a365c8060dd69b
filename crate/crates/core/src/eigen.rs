//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, plus the
//! spectral helpers built on it: numerical rank, singular values and PSD
//! square roots.
//!
//! Matrices here are small (at most a few dozen rows), so a dense
//! Jacobi sweep is both fast enough and accurate to a few ulps on every
//! eigenvalue, including the zero ones that rank decisions hinge on.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};

/// Sweep budget for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Iteration stops once the off-diagonal Frobenius norm drops below this
/// fraction of `‖H‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix.
///
/// Among equal eigenvalues the column order is whatever the rotations
/// produced; no canonical basis is chosen inside a degenerate eigenspace.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column_vec(k)
    }

    /// `U · diag(λ) · U†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }

    /// `U · diag(f(λ)) · U†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .filter(|&k| fl[k] != 0.0)
                .map(|k| u[(i, k)] * u[(j, k)].conj() * fl[k])
                .sum()
        })
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |a, &x| a.max(x.abs()))
    }

    /// Indices of eigenvalues above `tol · max|λ|`, largest eigenvalue first.
    pub fn support_indices(&self, tol: f64) -> Vec<usize> {
        let cut = tol * self.spectral_radius();
        let mut idx: Vec<usize> = (0..self.dim())
            .filter(|&k| self.eigenvalues[k] > cut)
            .collect();
        idx.reverse();
        idx
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `tol` bounds the accepted Hermiticity defect:
/// `‖H − H†‖_F ≤ tol · max(1, ‖H‖_F)`. The Hermitian part of `H` is what
/// gets diagonalized.
pub fn eigh(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    check_hermitian(h, tol)?;
    let (eig, converged) = jacobi(h.hermitian_part());
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }
    Ok(eig)
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(h: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    eigh(h, tol).map(|e| e.eigenvalues)
}

pub(crate) fn check_hermitian(h: &ComplexMatrix, tol: f64) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if !h.is_hermitian(tol) {
        return Err(Error::NotHermitian {
            deviation: h.hermitian_deviation(),
        });
    }
    Ok(())
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi on an exactly Hermitian matrix. Returns the (sorted)
/// decomposition and whether the off-diagonal criterion was met.
fn jacobi(mut a: ComplexMatrix) -> (HermitianEigen, bool) {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let stop = OFF_DIAGONAL_TOL * a.frobenius_norm();
    let mut converged = false;

    for _sweep in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a) <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (
        HermitianEigen {
            eigenvalues,
            eigenvectors,
        },
        converged,
    )
}

/// Applies the unitary rotation that zeroes `a[p, q]`: `A ← J†AJ`, `V ← VJ`,
/// with `J = [[c, s·e^{iθ}], [−s·e^{−iθ}, c]]` on coordinates `(p, q)`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let abs_b = b.norm();
    if abs_b == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = b / abs_b;

    let tau = (aqq - app) / (2.0 * abs_b);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let jpq = phase * s; // J[p, q]
    let jqp = -phase.conj() * s; // J[q, p]

    let n = a.rows();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = akp * c + akq * jqp;
        let new_kq = akp * jpq + akq * c;
        a[(k, p)] = new_kp;
        a[(k, q)] = new_kq;
        a[(p, k)] = new_kp.conj();
        a[(q, k)] = new_kq.conj();
    }
    a[(p, p)] = C64::new(app - t * abs_b, 0.0);
    a[(q, q)] = C64::new(aqq + t * abs_b, 0.0);
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * c;
    }
}

/// Singular values in descending order, `min(rows, cols)` of them.
///
/// Computed as the non-negative eigenvalues of the Hermitian dilation
/// `[[0, M], [M†, 0]]`, whose spectrum is `±σ_i` padded with zeros. This
/// keeps absolute accuracy near `ε·σ_max` instead of `√ε` for the Gram route.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let (r, c) = m.shape();
    let dil = ComplexMatrix::from_fn(r + c, r + c, |i, j| match (i < r, j < r) {
        (true, false) => m[(i, j - r)],
        (false, true) => m[(j, i - r)].conj(),
        _ => ZERO,
    });
    // Dilation is Hermitian by construction; accept the result even if the
    // sweep budget ran out, the diagonal is still the best available estimate.
    let (eig, _) = jacobi(dil);
    let k = r.min(c);
    eig.eigenvalues
        .iter()
        .rev()
        .take(k)
        .map(|&x| x.max(0.0))
        .collect()
}

/// Rank decision with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankProfile {
    pub rank: usize,
    /// Descending singular values.
    pub singular_values: Vec<f64>,
    /// Cut-off `tol · σ_max`.
    pub threshold: f64,
    /// Smallest singular value counted toward the rank.
    pub smallest_retained: Option<f64>,
    /// Largest singular value discarded as numerically zero.
    pub largest_discarded: Option<f64>,
}

/// Numerical rank with margin information. Singular values above
/// `tol · σ_max` count; equivalently, eigenvalues of `M†M` above
/// `tol² · λ_max`.
pub fn rank_profile(m: &ComplexMatrix, tol: f64) -> RankProfile {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let threshold = tol * smax;
    let rank = if smax == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > threshold).count()
    };
    RankProfile {
        rank,
        smallest_retained: rank.checked_sub(1).map(|k| sv[k]),
        largest_discarded: sv.get(rank).copied(),
        singular_values: sv,
        threshold,
    }
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    rank_profile(m, tol).rank
}

fn psd_eigen(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    let eig = eigh(h, tol)?;
    let floor = -tol * h.frobenius_norm().max(1.0);
    if let Some(&min) = eig.eigenvalues.first() {
        if min < floor {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    Ok(eig)
}

/// Principal square root of a PSD matrix. Slightly negative eigenvalues
/// (down to `−tol · max(1, ‖H‖_F)`) are clamped to zero.
pub fn psd_sqrt(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    Ok(psd_eigen(h, tol)?.map_spectrum(|x| x.max(0.0).sqrt()))
}

/// Pseudo-inverse of the square root: `λ^{-1/2}` on eigenvalues above
/// `tol · λ_max`, zero on the rest.
pub fn psd_inv_sqrt(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = psd_eigen(h, tol)?;
    let cut = tol * eig.spectral_radius();
    Ok(eig.map_spectrum(|x| if x > cut { 1.0 / x.sqrt() } else { 0.0 }))
}
