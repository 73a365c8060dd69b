//! Completely positive maps in Kraus form and their Choi states.
//!
//! A [`KrausMap`] with operators `V_l` (each `n×m`) acts as
//! `φ(A) = Σ_l V_l† A V_l` from `M_n` to `M_m`; its dual is
//! `φ*(B) = Σ_l V_l B V_l†`. The Choi state `σ_φ = Σ_ij E_ij ⊗ φ(E_ij)` has
//! marginal `K = φ(1_n)` on the second factor. On the first factor it has
//! `Lᵀ`, the transpose of `L = φ*(1_m)`, because `tr φ(E_ij) = L_ji`. For real
//! Kraus operators (and any real `L`) the two coincide.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bipartite::{validate_state, BipartiteState};
use crate::eigen::{eigh, rank_profile, RankProfile};
use crate::error::{Error, Result};
use crate::matrix::{sum_matrices, ComplexMatrix, C64};

/// Finite Kraus family `{V_1, …, V_r}` of `n×m` matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KrausFile", into = "KrausFile")]
pub struct KrausMap {
    n: usize,
    m: usize,
    ops: Vec<ComplexMatrix>,
}

/// Wire form: `{"n": n, "m": m, "ops": [<matrix>, ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KrausFile {
    n: usize,
    m: usize,
    ops: Vec<ComplexMatrix>,
}

impl TryFrom<KrausFile> for KrausMap {
    type Error = Error;

    fn try_from(f: KrausFile) -> Result<Self> {
        KrausMap::new(f.n, f.m, f.ops)
    }
}

impl From<KrausMap> for KrausFile {
    fn from(k: KrausMap) -> Self {
        KrausFile {
            n: k.n,
            m: k.m,
            ops: k.ops,
        }
    }
}

impl KrausMap {
    pub fn new(n: usize, m: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::EmptyKraus);
        }
        if let Some((l, op)) = ops.iter().enumerate().find(|(_, v)| v.shape() != (n, m)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {l} is {}x{}, expected {n}x{m}",
                op.rows(),
                op.cols()
            )));
        }
        Ok(Self { n, m, ops })
    }

    /// Dimension of the input algebra `M_n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the output algebra `M_m`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<ComplexMatrix> {
        self.ops
    }

    /// Number of Kraus operators `r`.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `φ(A) = Σ V† A V`.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.shape() != (self.n, self.n) {
            return Err(Error::DimensionMismatch(format!(
                "map input must be {0}x{0}, got {1}x{2}",
                self.n,
                a.rows(),
                a.cols()
            )));
        }
        Ok(sum_matrices(self.ops.iter().map(|v| &(&v.adjoint() * a) * v))
            .expect("Kraus family is non-empty"))
    }

    /// `φ*(B) = Σ V B V†`.
    pub fn dual_apply(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.shape() != (self.m, self.m) {
            return Err(Error::DimensionMismatch(format!(
                "dual map input must be {0}x{0}, got {1}x{2}",
                self.m,
                b.rows(),
                b.cols()
            )));
        }
        Ok(sum_matrices(self.ops.iter().map(|v| &(v * b) * &v.adjoint()))
            .expect("Kraus family is non-empty"))
    }

    /// `K = φ(1_n) = Σ V†V`, the marginal of the Choi state on `M_m`.
    pub fn marginal_k(&self) -> ComplexMatrix {
        sum_matrices(self.ops.iter().map(|v| &v.adjoint() * v)).expect("Kraus family is non-empty")
    }

    /// `L = φ*(1_m) = Σ V V†`. The Choi state's marginal on `M_n` is `Lᵀ`.
    pub fn marginal_l(&self) -> ComplexMatrix {
        sum_matrices(self.ops.iter().map(|v| v * &v.adjoint())).expect("Kraus family is non-empty")
    }

    /// Choi vectors `w_l = vec(conj V_l)` (row-major), so that
    /// `σ_φ = Σ_l |w_l⟩⟨w_l|`.
    pub fn choi_vectors(&self) -> Vec<Vec<C64>> {
        self.ops
            .iter()
            .map(|v| v.entries().iter().map(|z| z.conj()).collect())
            .collect()
    }

    /// `Σ_ij E_ij ⊗ φ(E_ij)` without any validation.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let (n, m) = (self.n, self.m);
        let mut out = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let e = ComplexMatrix::matrix_unit(n, i, j).expect("indices in range");
                let block = self.apply(&e).expect("shape checked");
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = block[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// The Choi state `σ_φ` as a validated state on `C^n ⊗ C^m`.
    ///
    /// Fails with `TraceNotOne` unless `|tr K − 1| ≤ tol`.
    pub fn choi_state(&self, tol: f64) -> Result<BipartiteState> {
        let trace = self.marginal_k().trace().re;
        if (trace - 1.0).abs() > tol {
            return Err(Error::TraceNotOne { trace });
        }
        validate_state(self.choi_matrix(), self.n, self.m, tol)
    }

    /// Replaces `V_l` by `Σ_k u[l, k] V_k`. The map itself is unchanged
    /// when `u` is unitary.
    pub fn mix(&self, u: &ComplexMatrix) -> Result<KrausMap> {
        let r = self.len();
        if u.shape() != (r, r) {
            return Err(Error::DimensionMismatch(format!(
                "mixing matrix must be {r}x{r}, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let ops = (0..r)
            .map(|l| {
                sum_matrices(self.ops.iter().enumerate().map(|(k, v)| v.scale_complex(u[(l, k)])))
                    .expect("non-empty")
            })
            .collect();
        KrausMap::new(self.n, self.m, ops)
    }

    /// Extreme in `CP(M_n, M_m; K)`, i.e. with only `φ(1)` prescribed.
    pub fn choi_extremality(&self, tol: f64) -> ExtremalityReport {
        choi_extremality(self, tol)
    }

    /// Extreme in `CP(M_n, M_m; K, L)`, equivalently σ_φ extreme in `C[L; K]`.
    pub fn doubly_constrained_extremality(&self, tol: f64) -> ExtremalityReport {
        doubly_constrained_extremality(self, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Independence of `{V_i† V_j}`: extremality with one marginal fixed.
    Choi,
    /// Independence of `{V_i† V_j ⊕ V_j V_i†}`: extremality with both marginals fixed.
    LandauStreater,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Choi => "Choi",
            Criterion::LandauStreater => "LandauStreater",
        })
    }
}

/// Gap around the rank cut-off, in singular values of the stacked matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankMargin {
    pub threshold: f64,
    pub smallest_retained: Option<f64>,
    pub largest_discarded: Option<f64>,
}

impl From<&RankProfile> for RankMargin {
    fn from(p: &RankProfile) -> Self {
        RankMargin {
            threshold: p.threshold,
            smallest_retained: p.smallest_retained,
            largest_discarded: p.largest_discarded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalityReport {
    pub criterion: Criterion,
    /// Number of stacked products, `r²`.
    pub family_size: usize,
    pub stacked_rank: usize,
    pub independent: bool,
    pub verdict: bool,
    pub margin: RankMargin,
    pub tol: f64,
}

impl ExtremalityReport {
    fn from_rows(criterion: Criterion, rows: &[Vec<C64>], tol: f64) -> Self {
        let stacked = ComplexMatrix::from_rows(rows).expect("rows share a length");
        let profile = rank_profile(&stacked, tol);
        let independent = profile.rank == rows.len();
        ExtremalityReport {
            criterion,
            family_size: rows.len(),
            stacked_rank: profile.rank,
            independent,
            verdict: independent,
            margin: RankMargin::from(&profile),
            tol,
        }
    }
}

/// Stacks `vec(V_i† V_j)` (row-major, `i` outer) as rows and tests whether
/// all `r²` rows are linearly independent over `C`.
pub fn choi_extremality(phi: &KrausMap, tol: f64) -> ExtremalityReport {
    let ops = phi.ops();
    let adj: Vec<ComplexMatrix> = ops.iter().map(ComplexMatrix::adjoint).collect();
    let mut rows = Vec::with_capacity(ops.len() * ops.len());
    for vi_adj in &adj {
        for vj in ops {
            rows.push((vi_adj * vj).into_entries());
        }
    }
    ExtremalityReport::from_rows(Criterion::Choi, &rows, tol)
}

/// Stacks `vec(V_i† V_j) ‖ vec(V_j V_i†)` as rows and tests for full row
/// rank `r²`. A joint relation `Σ c_ij V_i†V_j = 0 = Σ c_ij V_jV_i†` with
/// `c ≠ 0` is exactly a rank deficit.
pub fn doubly_constrained_extremality(phi: &KrausMap, tol: f64) -> ExtremalityReport {
    let ops = phi.ops();
    let adj: Vec<ComplexMatrix> = ops.iter().map(ComplexMatrix::adjoint).collect();
    let mut rows = Vec::with_capacity(ops.len() * ops.len());
    for (vi, vi_adj) in ops.iter().zip(&adj) {
        for vj in ops {
            let mut row = (vi_adj * vj).into_entries();
            row.extend((vj * &vi.adjoint()).into_entries());
            rows.push(row);
        }
    }
    ExtremalityReport::from_rows(Criterion::LandauStreater, &rows, tol)
}

/// Recovers a minimal Kraus family from a state: one operator per
/// eigenvalue above `tol · λ_max`, in descending eigenvalue order, each
/// with its largest-modulus entry made real and positive.
pub fn kraus_from_state(rho: &BipartiteState, tol: f64) -> Result<KrausMap> {
    let (n, m) = rho.dims();
    let eig = eigh(rho.matrix(), f64::INFINITY)?;
    let ops = eig
        .support_indices(tol)
        .into_iter()
        .map(|k| {
            let scale = eig.eigenvalues[k].sqrt();
            let u = eig.eigenvector(k);
            let op = ComplexMatrix::from_fn(n, m, |a, b| (u[a * m + b] * scale).conj());
            fix_phase(op)
        })
        .collect();
    KrausMap::new(n, m, ops)
}

fn fix_phase(op: ComplexMatrix) -> ComplexMatrix {
    let max = op.entries().iter().fold(0.0, |a: f64, z| a.max(z.norm()));
    if max == 0.0 {
        return op;
    }
    // First entry within rounding of the maximum, so near-ties resolve by position.
    let pivot = op
        .entries()
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-9))
        .copied()
        .expect("max exists");
    op.scale_complex(pivot.conj() / pivot.norm())
}

/// The extremal mixed entangled example in `M_2 ⊗ M_3`:
/// `V₁ = [[0, 1/√6, 0], [1/√3, 0, 0]]`, `V₂ = [[0, 0, 1/√3], [0, 1/√6, 0]]`.
pub fn extremal_example() -> KrausMap {
    let a = 1.0 / 6f64.sqrt();
    let b = 1.0 / 3f64.sqrt();
    let v1 = ComplexMatrix::from_real(2, 3, &[0.0, a, 0.0, b, 0.0, 0.0]).expect("2x3");
    let v2 = ComplexMatrix::from_real(2, 3, &[0.0, 0.0, b, 0.0, a, 0.0]).expect("2x3");
    KrausMap::new(2, 3, vec![v1, v2]).expect("valid family")
}

/// The 6×6 Choi state of [`extremal_example`], entered entry by entry.
pub fn extremal_example_state_matrix() -> ComplexMatrix {
    let c = 1.0 / (3.0 * 2f64.sqrt());
    let mut rho = ComplexMatrix::zeros(6, 6);
    let set = |rho: &mut ComplexMatrix, i: usize, j: usize, x: f64| {
        rho[(i, j)] = C64::new(x, 0.0);
        rho[(j, i)] = C64::new(x, 0.0);
    };
    set(&mut rho, 1, 1, 1.0 / 6.0);
    set(&mut rho, 4, 4, 1.0 / 6.0);
    set(&mut rho, 2, 2, 1.0 / 3.0);
    set(&mut rho, 3, 3, 1.0 / 3.0);
    set(&mut rho, 1, 3, c);
    set(&mut rho, 2, 4, c);
    rho
}
