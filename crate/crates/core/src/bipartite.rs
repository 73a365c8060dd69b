//! Bipartite density matrices on `C^n ⊗ C^m`.
//!
//! The product basis is lexicographic: `e_i ⊗ f_j` has index `i * m + j`,
//! so the state splits into `n × n` blocks of size `m × m`. "Partial trace
//! b" traces out the second factor and leaves the `n × n` marginal ρ₁;
//! "partial trace a" leaves the `m × m` marginal ρ₂.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eigen::{eigh, numerical_rank, rank_profile, RankProfile};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::random::GaussianSource;

/// A validated density matrix with its factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    mat: ComplexMatrix,
}

/// Wire form of a state: `{"dim_a": n, "dim_b": m, "matrix": <matrix>}`.
///
/// Deserializing only checks the shape of the JSON; use
/// [`StateFile::validate`] to obtain a [`BipartiteState`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: ComplexMatrix,
}

impl StateFile {
    pub fn validate(self, tol: f64) -> Result<BipartiteState> {
        validate_state(self.matrix, self.dim_a, self.dim_b, tol)
    }
}

impl From<&BipartiteState> for StateFile {
    fn from(s: &BipartiteState) -> Self {
        StateFile {
            dim_a: s.dim_a,
            dim_b: s.dim_b,
            matrix: s.mat.clone(),
        }
    }
}

impl Serialize for BipartiteState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateFile::from(self).serialize(s)
    }
}

impl BipartiteState {
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn rank(&self, tol: f64) -> usize {
        numerical_rank(&self.mat, tol)
    }

    /// Ascending spectrum of the state.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(&self.mat, f64::INFINITY)?.eigenvalues)
    }
}

/// One failed state invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DimensionMismatch {
        rows: usize,
        cols: usize,
        dim_a: usize,
        dim_b: usize,
    },
    NotHermitian { deviation: f64 },
    NotPsd { min_eigenvalue: f64 },
    TraceNotOne { trace: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch {
                rows,
                cols,
                dim_a,
                dim_b,
            } => write!(
                f,
                "matrix is {rows}x{cols} but dims ({dim_a}, {dim_b}) need {0}x{0}",
                dim_a * dim_b
            ),
            Violation::NotHermitian { deviation } => {
                write!(f, "not Hermitian (‖M − M†‖_F = {deviation:.3e})")
            }
            Violation::NotPsd { min_eigenvalue } => {
                write!(f, "not positive semidefinite (min eigenvalue {min_eigenvalue:.6e})")
            }
            Violation::TraceNotOne { trace } => write!(f, "trace is {trace:.12}, not 1"),
        }
    }
}

/// Raw measurements behind a validity verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateCheck {
    pub hermitian_deviation: f64,
    /// `None` when the shape is wrong.
    pub min_eigenvalue: Option<f64>,
    pub trace: f64,
    pub violations: Vec<Violation>,
}

impl StateCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Measures every state invariant of `mat` for dims `(n, m)` without
/// stopping at the first failure (a shape mismatch does stop it).
///
/// Tolerances: `‖M − M†‖_F ≤ tol·max(1, ‖M‖_F)`,
/// `λ_min ≥ −tol·max(1, ‖M‖_F)` and `|tr M − 1| ≤ tol`.
pub fn check_state(mat: &ComplexMatrix, n: usize, m: usize, tol: f64) -> StateCheck {
    let d = n * m;
    let trace = mat.trace().re;
    if n == 0 || m == 0 || mat.shape() != (d, d) {
        return StateCheck {
            hermitian_deviation: mat.hermitian_deviation(),
            min_eigenvalue: None,
            trace,
            violations: vec![Violation::DimensionMismatch {
                rows: mat.rows(),
                cols: mat.cols(),
                dim_a: n,
                dim_b: m,
            }],
        };
    }
    let scale = mat.frobenius_norm().max(1.0);
    let mut violations = Vec::new();
    let hermitian_deviation = mat.hermitian_deviation();
    if hermitian_deviation > tol * scale {
        violations.push(Violation::NotHermitian {
            deviation: hermitian_deviation,
        });
    }
    // Spectrum of the Hermitian part; meaningful even if the check above failed.
    let min_eigenvalue = eigh(&mat.hermitian_part(), f64::INFINITY)
        .ok()
        .and_then(|e| e.eigenvalues.first().copied());
    if let Some(min) = min_eigenvalue {
        if min < -tol * scale {
            violations.push(Violation::NotPsd { min_eigenvalue: min });
        }
    }
    if (trace - 1.0).abs() > tol {
        violations.push(Violation::TraceNotOne { trace });
    }
    StateCheck {
        hermitian_deviation,
        min_eigenvalue,
        trace,
        violations,
    }
}

/// Validates `mat` as a density matrix on `C^n ⊗ C^m`.
pub fn validate_state(mat: ComplexMatrix, n: usize, m: usize, tol: f64) -> Result<BipartiteState> {
    let check = check_state(&mat, n, m, tol);
    if !check.is_valid() {
        return Err(Error::InvalidState(check.violations));
    }
    Ok(BipartiteState {
        dim_a: n,
        dim_b: m,
        mat,
    })
}

fn assert_bipartite_shape(mat: &ComplexMatrix, n: usize, m: usize) {
    assert_eq!(
        mat.shape(),
        (n * m, n * m),
        "matrix shape does not match dims ({n}, {m})"
    );
}

/// `(1 ⊗ tr)` on a raw `(n·m)×(n·m)` matrix, giving an `n×n` matrix.
pub fn trace_out_b(mat: &ComplexMatrix, n: usize, m: usize) -> ComplexMatrix {
    assert_bipartite_shape(mat, n, m);
    ComplexMatrix::from_fn(n, n, |i, k| (0..m).map(|j| mat[(i * m + j, k * m + j)]).sum())
}

/// `(tr ⊗ 1)` on a raw `(n·m)×(n·m)` matrix, giving an `m×m` matrix.
pub fn trace_out_a(mat: &ComplexMatrix, n: usize, m: usize) -> ComplexMatrix {
    assert_bipartite_shape(mat, n, m);
    ComplexMatrix::from_fn(m, m, |j, l| (0..n).map(|i| mat[(i * m + j, i * m + l)]).sum())
}

/// Transposes every `m×m` block in place: `(1 ⊗ T)`.
pub fn transpose_b(mat: &ComplexMatrix, n: usize, m: usize) -> ComplexMatrix {
    assert_bipartite_shape(mat, n, m);
    let d = n * m;
    ComplexMatrix::from_fn(d, d, |r, c| {
        let (i, j) = (r / m, r % m);
        let (k, l) = (c / m, c % m);
        mat[(i * m + l, k * m + j)]
    })
}

/// Transposes the block pattern: `(T ⊗ 1)`.
pub fn transpose_a(mat: &ComplexMatrix, n: usize, m: usize) -> ComplexMatrix {
    assert_bipartite_shape(mat, n, m);
    let d = n * m;
    ComplexMatrix::from_fn(d, d, |r, c| {
        let (i, j) = (r / m, r % m);
        let (k, l) = (c / m, c % m);
        mat[(k * m + j, i * m + l)]
    })
}

/// Marginal ρ₁ = (1 ⊗ tr)ρ on the first factor.
pub fn partial_trace_b(rho: &BipartiteState) -> ComplexMatrix {
    trace_out_b(&rho.mat, rho.dim_a, rho.dim_b)
}

/// Marginal ρ₂ = (tr ⊗ 1)ρ on the second factor.
pub fn partial_trace_a(rho: &BipartiteState) -> ComplexMatrix {
    trace_out_a(&rho.mat, rho.dim_a, rho.dim_b)
}

/// `(1 ⊗ T)ρ`. Hermitian with unit trace, not necessarily PSD.
pub fn partial_transpose_b(rho: &BipartiteState) -> ComplexMatrix {
    transpose_b(&rho.mat, rho.dim_a, rho.dim_b)
}

/// `(T ⊗ 1)ρ`.
pub fn partial_transpose_a(rho: &BipartiteState) -> ComplexMatrix {
    transpose_a(&rho.mat, rho.dim_a, rho.dim_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PptVerdict {
    Separable,
    Entangled,
    Inconclusive,
}

impl fmt::Display for PptVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PptVerdict::Separable => "Separable",
            PptVerdict::Entangled => "Entangled",
            PptVerdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptReport {
    /// Ascending spectrum of `(1 ⊗ T)ρ`.
    pub spectrum: Vec<f64>,
    pub min_eigenvalue: f64,
    pub is_ppt: bool,
    pub verdict: PptVerdict,
}

/// Dimension pairs in which a positive partial transpose implies separability.
pub fn ppt_is_conclusive(n: usize, m: usize) -> bool {
    matches!((n, m), (2, 2) | (2, 3) | (3, 2))
}

/// Positive-partial-transpose test.
///
/// A negative eigenvalue below `−tol·max(1, ‖ρ‖_F)` means entangled in any
/// dimension. A PPT state is reported separable only where PPT is also
/// sufficient; elsewhere the verdict is `Inconclusive`.
pub fn ppt_check(rho: &BipartiteState, tol: f64) -> Result<PptReport> {
    let pt = partial_transpose_b(rho);
    let spectrum = eigh(&pt, f64::INFINITY)?.eigenvalues;
    let min_eigenvalue = spectrum[0];
    let is_ppt = min_eigenvalue >= -tol * rho.mat.frobenius_norm().max(1.0);
    let verdict = match (is_ppt, ppt_is_conclusive(rho.dim_a, rho.dim_b)) {
        (false, _) => PptVerdict::Entangled,
        (true, true) => PptVerdict::Separable,
        (true, false) => PptVerdict::Inconclusive,
    };
    Ok(PptReport {
        spectrum,
        min_eigenvalue,
        is_ppt,
        verdict,
    })
}

/// Rank-one projector onto `(Σ_i e_i ⊗ f_i)/√d`, where `f_i` are the
/// columns of the unitary `f_basis` (`d = 2` gives the two-qubit case).
pub fn max_entangled_projector(f_basis: &ComplexMatrix, tol: f64) -> Result<BipartiteState> {
    if !f_basis.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "basis matrix must be square, got {}x{}",
            f_basis.rows(),
            f_basis.cols()
        )));
    }
    let deviation = f_basis.unitary_deviation();
    if deviation > tol {
        return Err(Error::NotUnitary { deviation });
    }
    let d = f_basis.rows();
    let norm = 1.0 / (d as f64).sqrt();
    let tau: Vec<C64> = (0..d * d)
        .map(|idx| f_basis[(idx % d, idx / d)] * norm)
        .collect();
    validate_state(ComplexMatrix::outer(&tau, &tau), d, d, tol)
}

/// `⌊√(n² + m² − 1)⌋`, the largest rank an extreme point of `C[ρ₁; ρ₂]` can have.
pub fn parthasarathy_bound(n: usize, m: usize) -> usize {
    let target = (n * n + m * m).saturating_sub(1);
    let mut k = (target as f64).sqrt() as usize;
    while k * k > target {
        k -= 1;
    }
    while (k + 1) * (k + 1) <= target {
        k += 1;
    }
    k
}

/// Whether `rank(ρ)` respects [`parthasarathy_bound`]. A `false` answer
/// rules out extremality.
pub fn check_rank_bound(rho: &BipartiteState, tol: f64) -> bool {
    rho.rank(tol) <= parthasarathy_bound(rho.dim_a, rho.dim_b)
}

/// Outcome of the perturbation-space computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub state_rank: usize,
    /// Real dimension `r²` of Hermitian matrices on the support.
    pub parameters: usize,
    /// Real rank of the marginal constraint system.
    pub constraint_rank: usize,
    /// Dimension of the space of admissible perturbations.
    pub dimension: usize,
    pub constraints: RankProfile,
}

impl PerturbationReport {
    /// Extreme in `C[ρ₁; ρ₂]` exactly when no perturbation survives.
    pub fn is_extreme(&self) -> bool {
        self.dimension == 0
    }
}

/// Real coordinates of a Hermitian matrix: diagonal real parts, then real
/// and imaginary parts of the strict upper triangle.
fn hermitian_coordinates(x: &ComplexMatrix, out: &mut Vec<C64>) {
    let d = x.rows();
    for i in 0..d {
        out.push(C64::new(x[(i, i)].re, 0.0));
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(C64::new(x[(i, j)].re, 0.0));
            out.push(C64::new(x[(i, j)].im, 0.0));
        }
    }
}

/// Computes the space of Hermitian `Δ` supported on `range(ρ)` with both
/// partial traces zero. `ρ ± εΔ` stays in `C[ρ₁; ρ₂]` for small ε, so ρ is
/// an extreme point iff this space is trivial.
pub fn perturbation_freedom(rho: &BipartiteState, tol: f64) -> Result<PerturbationReport> {
    let (n, m) = rho.dims();
    let eig = eigh(&rho.mat, f64::INFINITY)?;
    let support: Vec<Vec<C64>> = eig
        .support_indices(tol)
        .into_iter()
        .map(|k| eig.eigenvector(k))
        .collect();
    let r = support.len();

    // Marginals of |w_k⟩⟨w_l| for every pair.
    let mut marg_a = Vec::with_capacity(r * r);
    let mut marg_b = Vec::with_capacity(r * r);
    for wk in &support {
        for wl in &support {
            let outer = ComplexMatrix::outer(wk, wl);
            marg_a.push(trace_out_a(&outer, n, m));
            marg_b.push(trace_out_b(&outer, n, m));
        }
    }
    let pair = |k: usize, l: usize| k * r + l;
    let i = C64::new(0.0, 1.0);

    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(r * r);
    let mut push_column = |a: ComplexMatrix, b: ComplexMatrix| {
        let mut col = Vec::with_capacity(m * m + n * n);
        hermitian_coordinates(&a, &mut col);
        hermitian_coordinates(&b, &mut col);
        columns.push(col);
    };
    for k in 0..r {
        push_column(marg_a[pair(k, k)].clone(), marg_b[pair(k, k)].clone());
        for l in k + 1..r {
            let (kl, lk) = (pair(k, l), pair(l, k));
            push_column(&marg_a[kl] + &marg_a[lk], &marg_b[kl] + &marg_b[lk]);
            push_column(
                (&marg_a[kl] - &marg_a[lk]).scale_complex(i),
                (&marg_b[kl] - &marg_b[lk]).scale_complex(i),
            );
        }
    }

    let parameters = r * r;
    if parameters == 0 {
        return Ok(PerturbationReport {
            state_rank: 0,
            parameters: 0,
            constraint_rank: 0,
            dimension: 0,
            constraints: rank_profile(&ComplexMatrix::zeros(1, 1), tol),
        });
    }
    let system = ComplexMatrix::from_rows(&columns)?.transpose();
    let constraints = rank_profile(&system, tol);
    Ok(PerturbationReport {
        state_rank: r,
        parameters,
        constraint_rank: constraints.rank,
        dimension: parameters - constraints.rank,
        constraints,
    })
}

/// Dimension of the marginal-preserving perturbation space; 0 iff ρ is extreme.
pub fn perturbation_freedom_dim(rho: &BipartiteState, tol: f64) -> Result<usize> {
    Ok(perturbation_freedom(rho, tol)?.dimension)
}

/// `A ⊗ B` as a validated state.
pub fn product_state(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<BipartiteState> {
    validate_state(a.kron(b), a.rows(), b.rows(), tol)
}

/// Random separable state `Σ_i α_i ρ_i¹ ⊗ ρ_i²` with `k` terms, random
/// weights and random Ginibre-induced factor states.
pub fn random_separable(n: usize, m: usize, k: usize, seed: u64) -> Result<BipartiteState> {
    if k == 0 || n == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "random_separable needs positive n, m, k (got {n}, {m}, {k})"
        )));
    }
    let mut g = GaussianSource::new(seed);
    let weights = g.probability_vector(k);
    let mut mat = ComplexMatrix::zeros(n * m, n * m);
    for w in weights {
        let a = g.density_matrix(n);
        let b = g.density_matrix(m);
        mat = &mat + &a.kron(&b).scale(w);
    }
    validate_state(mat, n, m, crate::DEFAULT_TOL)
}
