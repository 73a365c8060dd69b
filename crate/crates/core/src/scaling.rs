//! Alternating operator scaling toward prescribed marginals.
//!
//! Each iteration applies a right scaling that makes `Σ V†V = K` exactly,
//! followed by a left scaling that makes `Σ V V† = L` exactly:
//!
//! ```text
//! V_l ← V_l · S^{-1/2} · K^{1/2},   S = Σ V†V
//! V_l ← L^{1/2} · T^{-1/2} · V_l,   T = Σ V V†
//! ```
//!
//! After the left half-step only `residual_k` can be nonzero, so it is the
//! slack reported per iteration. Convergence is empirical; failures are
//! reported as errors carrying the full trace.

use serde::Serialize;

use crate::bipartite::BipartiteState;
use crate::cpmaps::{doubly_constrained_extremality, ExtremalityReport, KrausMap};
use crate::eigen::{numerical_rank, psd_inv_sqrt, psd_sqrt};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::random::GaussianSource;
use crate::DEFAULT_TOL;

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;

/// Accepted deviation of a target's trace from 1.
const TARGET_TRACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ScalingConfig {
    target_k: ComplexMatrix,
    target_l: ComplexMatrix,
    pub max_iter: usize,
    pub residual_tol: f64,
}

impl ScalingConfig {
    /// Targets `K` (`m×m`) and `L` (`n×n`); both must be PSD with unit trace.
    pub fn new(target_k: ComplexMatrix, target_l: ComplexMatrix) -> Result<Self> {
        for t in [&target_k, &target_l] {
            psd_sqrt(t, DEFAULT_TOL)?;
            let trace = t.trace().re;
            if (trace - 1.0).abs() > TARGET_TRACE_TOL {
                return Err(Error::TraceNotOne { trace });
            }
        }
        Ok(Self {
            target_k,
            target_l,
            max_iter: DEFAULT_MAX_ITER,
            residual_tol: DEFAULT_RESIDUAL_TOL,
        })
    }

    /// Maximally mixed targets `K = 1_m/m`, `L = 1_n/n`.
    pub fn maximally_mixed(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument("dimensions must be positive".into()));
        }
        Self::new(
            ComplexMatrix::scaled_identity(m, 1.0 / m as f64),
            ComplexMatrix::scaled_identity(n, 1.0 / n as f64),
        )
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self
    }

    pub fn target_k(&self) -> &ComplexMatrix {
        &self.target_k
    }

    pub fn target_l(&self) -> &ComplexMatrix {
        &self.target_l
    }

    /// `(n, m)` implied by the targets.
    pub fn dims(&self) -> (usize, usize) {
        (self.target_l.rows(), self.target_k.rows())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub iterations: usize,
    /// `‖Σ V†V − K‖_F` at termination.
    pub residual_k: f64,
    /// `‖Σ V V† − L‖_F` at termination.
    pub residual_l: f64,
    pub converged: bool,
    /// `(residual_k, residual_l)` at the end of each iteration.
    pub history: Vec<(f64, f64)>,
}

impl ScalingReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_k.max(self.residual_l)
    }
}

/// `r` seeded Ginibre `n×m` operators scaled so that `tr Σ V†V = 1`.
pub fn random_kraus(n: usize, m: usize, r: usize, seed: u64) -> Result<KrausMap> {
    if r == 0 || n == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "random_kraus needs positive n, m, r (got {n}, {m}, {r})"
        )));
    }
    let mut g = GaussianSource::new(seed);
    let ops: Vec<ComplexMatrix> = (0..r).map(|_| g.ginibre(n, m)).collect();
    let total: f64 = ops.iter().map(|v| v.frobenius_norm().powi(2)).sum();
    let s = 1.0 / total.sqrt();
    KrausMap::new(n, m, ops.iter().map(|v| v.scale(s)).collect())
}

/// `(‖Σ V†V − K‖_F, ‖Σ V V† − L‖_F)`.
pub fn residuals(phi: &KrausMap, k: &ComplexMatrix, l: &ComplexMatrix) -> Result<(f64, f64)> {
    check_dims(phi, k, l)?;
    Ok((
        phi.marginal_k().frobenius_distance(k),
        phi.marginal_l().frobenius_distance(l),
    ))
}

fn check_dims(phi: &KrausMap, k: &ComplexMatrix, l: &ComplexMatrix) -> Result<()> {
    if k.shape() != (phi.m(), phi.m()) || l.shape() != (phi.n(), phi.n()) {
        return Err(Error::DimensionMismatch(format!(
            "map is {}→{} but targets are K {}x{}, L {}x{}",
            phi.n(),
            phi.m(),
            k.rows(),
            k.cols(),
            l.rows(),
            l.cols()
        )));
    }
    Ok(())
}

/// `V ← V · S^{-1/2} · K^{1/2}` with `S = Σ V†V`, enforcing `Σ V†V = K`.
pub fn scale_right(phi: &KrausMap, target_k: &ComplexMatrix) -> Result<KrausMap> {
    let sqrt_k = psd_sqrt(target_k, DEFAULT_TOL)?;
    let rank_k = numerical_rank(target_k, DEFAULT_TOL);
    right_step(phi, &sqrt_k, rank_k)
}

/// `V ← L^{1/2} · T^{-1/2} · V` with `T = Σ V V†`, enforcing `Σ V V† = L`.
pub fn scale_left(phi: &KrausMap, target_l: &ComplexMatrix) -> Result<KrausMap> {
    let sqrt_l = psd_sqrt(target_l, DEFAULT_TOL)?;
    let rank_l = numerical_rank(target_l, DEFAULT_TOL);
    left_step(phi, &sqrt_l, rank_l)
}

fn right_step(phi: &KrausMap, sqrt_k: &ComplexMatrix, rank_k: usize) -> Result<KrausMap> {
    let s = phi.marginal_k();
    let rank = numerical_rank(&s, DEFAULT_TOL);
    if rank < rank_k {
        return Err(Error::SingularScaling {
            side: "right (Σ V†V)",
            rank,
            target_rank: rank_k,
        });
    }
    let x = &psd_inv_sqrt(&s, DEFAULT_TOL)? * sqrt_k;
    KrausMap::new(phi.n(), phi.m(), phi.ops().iter().map(|v| v * &x).collect())
}

fn left_step(phi: &KrausMap, sqrt_l: &ComplexMatrix, rank_l: usize) -> Result<KrausMap> {
    let t = phi.marginal_l();
    let rank = numerical_rank(&t, DEFAULT_TOL);
    if rank < rank_l {
        return Err(Error::SingularScaling {
            side: "left (Σ V V†)",
            rank,
            target_rank: rank_l,
        });
    }
    let y = sqrt_l * &psd_inv_sqrt(&t, DEFAULT_TOL)?;
    KrausMap::new(phi.n(), phi.m(), phi.ops().iter().map(|v| &y * v).collect())
}

/// Runs alternating right/left scaling from `phi0` until both residuals are
/// at most `cfg.residual_tol` or `cfg.max_iter` iterations have run.
pub fn sinkhorn_scale(phi0: &KrausMap, cfg: &ScalingConfig) -> Result<(KrausMap, ScalingReport)> {
    let (k, l) = (cfg.target_k(), cfg.target_l());
    let (mut res_k, mut res_l) = residuals(phi0, k, l)?;
    let mut phi = phi0.clone();
    let mut history = Vec::new();

    let sqrt_k = psd_sqrt(k, DEFAULT_TOL)?;
    let sqrt_l = psd_sqrt(l, DEFAULT_TOL)?;
    let rank_k = numerical_rank(k, DEFAULT_TOL);
    let rank_l = numerical_rank(l, DEFAULT_TOL);

    let mut iterations = 0;
    let mut converged = res_k.max(res_l) <= cfg.residual_tol;
    while !converged && iterations < cfg.max_iter {
        phi = right_step(&phi, &sqrt_k, rank_k)?;
        phi = left_step(&phi, &sqrt_l, rank_l)?;
        iterations += 1;
        (res_k, res_l) = residuals(&phi, k, l)?;
        history.push((res_k, res_l));
        converged = res_k.max(res_l) <= cfg.residual_tol;
    }

    let report = ScalingReport {
        iterations,
        residual_k: res_k,
        residual_l: res_l,
        converged,
        history,
    };
    if !converged {
        return Err(Error::ScalingNoConvergence(Box::new(report)));
    }
    Ok((phi, report))
}

/// A scaled Kraus family together with its verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremalCandidate {
    pub map: KrausMap,
    pub scaling: ScalingReport,
    pub extremality: ExtremalityReport,
    pub state: BipartiteState,
}

/// Random Kraus family → operator scaling → doubly constrained
/// extremality test → Choi state.
///
/// `r² > n² + m²` is rejected up front since the `r²` stacked products
/// cannot then be independent.
pub fn find_extremal_candidate(
    n: usize,
    m: usize,
    r: usize,
    cfg: &ScalingConfig,
    seed: u64,
) -> Result<ExtremalCandidate> {
    if r == 0 {
        return Err(Error::InvalidArgument("Kraus rank must be positive".into()));
    }
    if r * r > n * n + m * m {
        return Err(Error::InfeasibleRank { n, m, r });
    }
    if cfg.dims() != (n, m) {
        let (cn, cm) = cfg.dims();
        return Err(Error::DimensionMismatch(format!(
            "targets are for ({cn}, {cm}), requested ({n}, {m})"
        )));
    }
    let phi0 = random_kraus(n, m, r, seed)?;
    let (map, scaling) = sinkhorn_scale(&phi0, cfg)?;
    let extremality = doubly_constrained_extremality(&map, DEFAULT_TOL);
    let state = map.choi_state(DEFAULT_TOL)?;
    Ok(ExtremalCandidate {
        map,
        scaling,
        extremality,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpmaps::extremal_example;

    fn targets_23() -> ScalingConfig {
        ScalingConfig::maximally_mixed(2, 3).unwrap()
    }

    #[test]
    fn config_rejects_bad_targets() {
        let k = ComplexMatrix::scaled_identity(3, 0.5);
        let l = ComplexMatrix::scaled_identity(2, 0.5);
        assert!(matches!(ScalingConfig::new(k, l.clone()), Err(Error::TraceNotOne { .. })));
        let neg = ComplexMatrix::diag(&[1.5, -0.5]);
        assert!(matches!(ScalingConfig::new(neg, l), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn random_kraus_normalized_and_deterministic() {
        let a = random_kraus(2, 3, 2, 4).unwrap();
        assert_eq!(a.len(), 2);
        assert!((a.marginal_k().trace().re - 1.0).abs() < 1e-12);
        assert_eq!(a, random_kraus(2, 3, 2, 4).unwrap());
        assert!(random_kraus(2, 3, 0, 4).is_err());
    }

    #[test]
    fn residuals_of_example_vanish() {
        let cfg = targets_23();
        let (rk, rl) = residuals(&extremal_example(), cfg.target_k(), cfg.target_l()).unwrap();
        assert!(rk <= 1e-15 && rl <= 1e-15, "{rk} {rl}");
        let bad = ComplexMatrix::identity(2);
        assert!(residuals(&extremal_example(), &bad, cfg.target_l()).is_err());
    }

    #[test]
    fn padded_single_op_has_positive_residuals() {
        let mut v = ComplexMatrix::zeros(2, 3);
        v[(0, 0)] = crate::matrix::ONE;
        let phi = KrausMap::new(2, 3, vec![v]).unwrap();
        let cfg = targets_23();
        let (rk, rl) = residuals(&phi, cfg.target_k(), cfg.target_l()).unwrap();
        assert!(rk > 0.0 && rl > 0.0);
    }

    #[test]
    fn feasible_input_is_a_fixed_point() {
        let phi = extremal_example();
        let (out, rep) = sinkhorn_scale(&phi, &targets_23()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 0);
        assert!(rep.history.is_empty());
        assert_eq!(out, phi);
    }

    #[test]
    fn single_op_cannot_reach_full_rank_target() {
        let phi = random_kraus(2, 3, 1, 3).unwrap();
        let err = sinkhorn_scale(&phi, &targets_23()).unwrap_err();
        assert!(matches!(
            err,
            Error::SingularScaling { .. } | Error::ScalingNoConvergence(_)
        ));
    }

    #[test]
    fn half_steps_enforce_their_marginal() {
        let cfg = targets_23();
        let phi = random_kraus(2, 3, 3, 8).unwrap();
        let right = scale_right(&phi, cfg.target_k()).unwrap();
        assert!(right.marginal_k().frobenius_distance(cfg.target_k()) <= 1e-12);
        let left = scale_left(&right, cfg.target_l()).unwrap();
        assert!(left.marginal_l().frobenius_distance(cfg.target_l()) <= 1e-12);
    }

    #[test]
    fn infeasible_rank_rejected() {
        let err = find_extremal_candidate(2, 3, 4, &targets_23(), 1).unwrap_err();
        assert!(matches!(err, Error::InfeasibleRank { n: 2, m: 3, r: 4 }));
    }

    #[test]
    fn budget_exhaustion_reports_history() {
        let cfg = targets_23().with_max_iter(1).with_residual_tol(1e-300);
        let phi = random_kraus(2, 3, 2, 12).unwrap();
        match sinkhorn_scale(&phi, &cfg) {
            Err(Error::ScalingNoConvergence(rep)) => {
                assert_eq!(rep.iterations, 1);
                assert_eq!(rep.history.len(), 1);
                assert!(!rep.converged);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
