//! Constrained entropy minimization for block-diagonal density matrices.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`], [`state`] and [`entropy`]: complex Hermitian matrices, density matrices,
//!   Shannon / von Neumann / relative entropy, trace distance and purity.
//! - [`block`]: block decompositions `H = ⊕ Hᵢ` realised as contiguous index ranges, and
//!   states of the form `ρ = ⊕ pᵢ ρᵢ`.
//! - [`constraint`]: block-convex sets (a marginal polytope plus per-block conditional
//!   sets), membership and seeded sampling.
//! - [`minimizer`]: exact entropy minimization and the trace distance to the minimizer set.
//! - [`stability`] and [`gibbs`]: Monte-Carlo checks of `S(ρ) − S_min ≥ C·dist₁(ρ, M)²`,
//!   sharpness families and the fixed-population (Gibbs) setting.
//! - [`spec_file`] and [`report`]: the JSON constraint-spec and run-report formats used by
//!   the `blockent` binary.
//!
//! Entropies are in nats throughout.

#![forbid(unsafe_code)]

pub mod block;
pub mod constraint;
pub mod entropy;
pub mod error;
pub mod gibbs;
pub mod hull;
pub mod linalg;
pub mod majorization;
pub mod minimizer;
pub mod report;
pub mod rng;
pub mod selftest;
pub mod spec_file;
pub mod stability;
pub mod state;
pub mod tol;

pub use block::{BlockDecomposition, BlockState};
pub use constraint::{BlockConvexSet, ConditionalSet, MarginalPolytope};
pub use error::{Error, Result};
pub use linalg::{eigh, CMat, Spectrum};
pub use minimizer::{minimize_entropy, MinimizerDescription};
pub use stability::{SharpnessReport, StabilityReport};
pub use state::{DensityMatrix, HermitianMatrix, ProbabilityVector};
