use thiserror::Error;

use crate::bipartite::Violation;
use crate::scaling::ScalingReport;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries contain NaN or infinity")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("invalid state: {}", list_violations(.0))]
    InvalidState(Vec<Violation>),

    #[error("Kraus family must contain at least one operator")]
    EmptyKraus,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "scaling lost support: {side} sum has rank {rank}, target has rank {target_rank}"
    )]
    SingularScaling {
        side: &'static str,
        rank: usize,
        target_rank: usize,
    },

    #[error(
        "scaling did not converge after {} iterations (residuals {:.3e}, {:.3e})",
        .0.iterations, .0.residual_k, .0.residual_l
    )]
    ScalingNoConvergence(Box<ScalingReport>),

    #[error("Kraus rank {r} is infeasible for ({n}, {m}): r^2 = {} exceeds n^2 + m^2 = {}", r * r, n * n + m * m)]
    InfeasibleRank { n: usize, m: usize, r: usize },
}

fn list_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
