//! Composite quantum states with fixed marginals.
//!
//! The crate builds Choi states from Kraus families, checks marginals,
//! rank bounds and the PPT entanglement criterion, and decides whether a
//! state is an extreme point of the convex set `C[ρ₁; ρ₂]` of states with
//! prescribed marginals, both from a Kraus representation and directly
//! from the state. An operator-scaling search produces new extremal
//! candidates.
//!
//! ```
//! use qmarg::{cpmaps, bipartite};
//!
//! let phi = cpmaps::extremal_example();
//! let rho = phi.choi_state(qmarg::DEFAULT_TOL).unwrap();
//! assert_eq!(rho.rank(qmarg::DEFAULT_TOL), 2);
//! assert!(phi.doubly_constrained_extremality(qmarg::DEFAULT_TOL).verdict);
//! let ppt = bipartite::ppt_check(&rho, qmarg::DEFAULT_TOL).unwrap();
//! assert_eq!(ppt.verdict, bipartite::PptVerdict::Entangled);
//! ```

#![forbid(unsafe_code)]

pub mod bipartite;
pub mod cpmaps;
pub mod eigen;
pub mod error;
pub mod matrix;
pub mod random;
pub mod scaling;

pub use bipartite::{BipartiteState, PptReport, PptVerdict, StateFile};
pub use cpmaps::{Criterion, ExtremalityReport, KrausMap};
pub use eigen::{eigh, numerical_rank, psd_inv_sqrt, psd_sqrt, HermitianEigen};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use random::GaussianSource;
pub use scaling::{ScalingConfig, ScalingReport};

/// Default relative tolerance for rank, support and validity decisions.
pub const DEFAULT_TOL: f64 = 1e-8;
