//! Fixed-population (Gibbs) constraint sets built from the spectral blocks of an observable.

use crate::block::BlockDecomposition;
use crate::constraint::{BlockConvexSet, ConditionalSet, MarginalPolytope};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::minimizer::minimize_entropy;
use crate::stability::{run_verification, C1Estimate, StabilityReport, VerifyConfig};
use crate::state::{HermitianMatrix, ProbabilityVector};

/// Eigenvalue clusters of an observable, in ascending energy order.
#[derive(Debug, Clone)]
pub struct SpectralBlocks {
    pub decomposition: BlockDecomposition,
    /// Mean eigenvalue of each cluster.
    pub energies: Vec<f64>,
    /// Columns are eigenvectors, grouped block by block.
    pub basis: CMat,
}

/// Groups eigenvalues greedily in ascending order; a gap larger than
/// `cluster_tol` between consecutive eigenvalues starts a new block.
pub fn gibbs_from_observable(h0: &HermitianMatrix, cluster_tol: f64) -> SpectralBlocks {
    let spec = h0.spectrum();
    let n = spec.eigenvalues.len();
    // eigh sorts descending
    let asc: Vec<usize> = (0..n).rev().collect();
    let mut dims = Vec::new();
    let mut energies = Vec::new();
    let mut current: Vec<f64> = Vec::new();
    for &k in &asc {
        let e = spec.eigenvalues[k];
        if let Some(&last) = current.last() {
            if e - last > cluster_tol {
                dims.push(current.len());
                energies.push(current.iter().sum::<f64>() / current.len() as f64);
                current.clear();
            }
        }
        current.push(e);
    }
    dims.push(current.len());
    energies.push(current.iter().sum::<f64>() / current.len() as f64);
    let mut basis = CMat::zeros(n, n);
    for (dst, &src) in asc.iter().enumerate() {
        basis.set_column(dst, &spec.eigenvectors.column(src));
    }
    SpectralBlocks {
        decomposition: BlockDecomposition::new(dims).expect("clusters are non-empty"),
        energies,
        basis,
    }
}

/// Validates `h0` and clusters its spectrum.
pub fn gibbs_from_matrix(h0: CMat, cluster_tol: f64) -> Result<SpectralBlocks> {
    Ok(gibbs_from_observable(&HermitianMatrix::new(h0)?, cluster_tol))
}

/// `C_q`: fixed block populations `q`, arbitrary states inside each block.
pub fn gibbs_constraint_set(decomp: &BlockDecomposition, q: &ProbabilityVector) -> Result<BlockConvexSet> {
    if q.as_slice().iter().any(|&x| x <= 0.0) {
        return Err(Error::InvalidDistribution("populations must be strictly positive".into()));
    }
    BlockConvexSet::new(
        decomp.clone(),
        MarginalPolytope::singleton(q.clone()),
        vec![ConditionalSet::Full; decomp.num_blocks()],
    )
}

pub fn is_uniform(q: &ProbabilityVector) -> bool {
    let u = 1.0 / q.len() as f64;
    q.as_slice().iter().all(|x| (x - u).abs() <= 1e-12)
}

/// Verifies `gap ≥ dist²/(2r)` (and `dist ≤ √(2r·gap)`) for uniform `q`;
/// other populations are checked against `C = ¼`.
pub fn gibbs_verify(
    decomp: &BlockDecomposition,
    q: &ProbabilityVector,
    n_samples: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if q.len() != decomp.num_blocks() {
        return Err(Error::DimensionMismatch {
            expected: decomp.num_blocks(),
            found: q.len(),
        });
    }
    if n_samples == 0 {
        return Err(Error::validation("samples", "must be ≥ 1"));
    }
    let c = gibbs_constraint_set(decomp, q)?;
    let md = minimize_entropy(&c);
    let r = decomp.num_blocks();
    let uniform = is_uniform(q);
    let cfg = VerifyConfig {
        assembled_c: if uniform { 1.0 / (2.0 * r as f64) } else { 0.25 },
        c1: C1Estimate::NotApplicable,
        sqrt_bound_blocks: uniform.then_some(r),
    };
    run_verification(&c, &md, cfg, n_samples, seed)
}

/// Rotates a block-basis matrix back to the observable's original basis.
pub fn to_original_basis(blocks: &SpectralBlocks, m: &CMat) -> CMat {
    &blocks.basis * m * blocks.basis.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{entropy_of_blockstate, BlockState};
    use crate::entropy::binary_entropy;
    use crate::linalg;
    use crate::minimizer::distance_to_minimizers;
    use crate::state::DensityMatrix;
    use approx::assert_abs_diff_eq;

    fn blocks_of(diag: &[f64], tol: f64) -> Vec<usize> {
        gibbs_from_matrix(linalg::real_diag(diag), tol).unwrap().decomposition.dims().to_vec()
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(blocks_of(&[1.0, 1.0, 2.0], 0.5), vec![2, 1]);
        assert_eq!(blocks_of(&[1.0; 4], 1e-9), vec![4]);
        assert_eq!(blocks_of(&[0.0, 1e-12, 5.0], 1e-9), vec![2, 1]);
        assert_eq!(blocks_of(&[3.0, 0.0, 3.0, 1.0], 0.1), vec![1, 1, 2]);
        let mut m = linalg::real_diag(&[1.0, 2.0]);
        m[(0, 1)] = linalg::c64(1.0, 0.0);
        assert!(matches!(gibbs_from_matrix(m, 0.1), Err(Error::NonHermitianInput(_))));
    }

    #[test]
    fn basis_diagonalises_observable() {
        let mut h = linalg::real_diag(&[2.0, 0.0, 2.0]);
        h[(0, 1)] = linalg::c64(0.0, 1.0);
        h[(1, 0)] = linalg::c64(0.0, -1.0);
        let sb = gibbs_from_matrix(h.clone(), 1e-6).unwrap();
        let d = sb.basis.adjoint() * &h * &sb.basis;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(d[(i, j)].norm() < 1e-10);
                }
            }
        }
        assert!(sb.energies.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn explicit_ratio_example() {
        let decomp = BlockDecomposition::new(vec![2, 2]).unwrap();
        let q = ProbabilityVector::uniform(2);
        let c = gibbs_constraint_set(&decomp, &q).unwrap();
        let md = minimize_entropy(&c);
        let delta = 0.1;
        let bs = BlockState::from_parts(
            decomp,
            q,
            vec![DensityMatrix::from_diagonal(&[1.0 - delta, delta]).unwrap(), DensityMatrix::basis_state(2, 0)],
        )
        .unwrap();
        let gap = entropy_of_blockstate(&bs) - md.s_min;
        let (dist, _) = distance_to_minimizers(&c, &bs, &md).unwrap();
        assert_abs_diff_eq!(gap, 0.5 * binary_entropy(delta), epsilon = 1e-12);
        assert_abs_diff_eq!(dist, 0.1, epsilon = 1e-12);
        assert!((gap / (dist * dist) - 16.25).abs() < 0.05);
    }

    #[test]
    fn rejects_non_positive_populations() {
        let decomp = BlockDecomposition::new(vec![1, 1]).unwrap();
        let q = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(gibbs_verify(&decomp, &q, 10, 0), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn uniform_r2_has_no_violations() {
        let decomp = BlockDecomposition::new(vec![2, 2]).unwrap();
        let rep = gibbs_verify(&decomp, &ProbabilityVector::uniform(2), 2_000, 4).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.sqrt_bound_violations, Some(0));
        assert_eq!(rep.assembled_c, 0.25);
    }
}
