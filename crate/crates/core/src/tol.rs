//! Numerical tolerances shared across the crate.

/// Maximum `|a_ij − conj(a_ji)|` for a matrix to count as Hermitian.
pub const HERM: f64 = 1e-9;
/// Allowed deviation of a trace (or probability sum) from 1.
pub const NORM: f64 = 1e-9;
/// Eigenvalues / weights in `[−PSD, 0)` are clipped to zero.
pub const PSD: f64 = 1e-9;
/// Eigenvalues above this threshold count as part of the support.
pub const SUPP: f64 = 1e-10;
/// Reconstruction error allowed for eigendecompositions and round trips.
pub const RECON: f64 = 1e-8;
/// Orthonormality error allowed for eigenvectors.
pub const ORTH: f64 = 1e-8;
/// Largest off-block modulus for a matrix to count as block diagonal.
pub const OFFBLOCK: f64 = 1e-9;
/// Residual threshold for convex-hull feasibility solves.
pub const MEMB: f64 = 1e-7;
/// Absolute tolerance for entropy ties between candidate minimizers.
pub const TIE: f64 = 1e-9;
/// Slack on the gap side when counting stability violations.
pub const VIOL: f64 = 1e-9;
/// Distances below this are treated as "at a minimizer" and skipped in ratios.
pub const DIST_SKIP: f64 = 1e-8;
