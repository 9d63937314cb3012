//! Validated value types: probability vectors, Hermitian matrices and density matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, Spectrum};
use crate::tol;

/// A point of the probability simplex `Δ_r`.
///
/// Entries in `[−τ_psd, 0)` are accepted and stored as exact zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < -tol::PSD)
        {
            return Err(Error::InvalidDistribution(format!("weight[{i}] = {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::NORM {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self(weights.into_iter().map(|w| w.max(0.0)).collect()))
    }

    pub fn uniform(r: usize) -> Self {
        Self(vec![1.0 / r as f64; r])
    }

    /// Standard basis vector `e_k` of length `r`.
    pub fn point_mass(r: usize, k: usize) -> Self {
        let mut w = vec![0.0; r];
        w[k] = 1.0;
        Self(w)
    }

    /// Wraps weights already known to lie in the simplex.
    pub(crate) fn new_unchecked(weights: Vec<f64>) -> Self {
        Self(weights)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// `‖self − other‖₁`.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.0
    }
}

/// A square complex matrix equal to its conjugate transpose within `τ_herm`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMat);

impl HermitianMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let dev = linalg::hermitian_deviation(&m);
        if dev > tol::HERM {
            return Err(Error::NonHermitianInput(dev));
        }
        Ok(Self(linalg::hermitian_part(&m)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn spectrum(&self) -> Spectrum {
        linalg::eigh(&self.0).expect("validated Hermitian")
    }
}

/// A positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMat);

impl DensityMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        let h = HermitianMatrix::new(m).map_err(|e| match e {
            Error::NonHermitianInput(d) => Error::InvalidState(format!("not Hermitian (deviation {d:.3e})")),
            other => other,
        })?;
        let tr = linalg::trace(h.matrix()).re;
        if (tr - 1.0).abs() > tol::NORM {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = linalg::eigvalsh(h.matrix()).last().copied().unwrap_or(0.0);
        if min < -tol::PSD {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self(h.into_inner()))
    }

    /// For matrices that are valid by construction (mixtures, normalised Gram matrices).
    pub(crate) fn new_unchecked(m: CMat) -> Self {
        Self(linalg::hermitian_part(&m))
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::new(linalg::real_diag(p))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMat::identity(dim, dim) * c64(1.0 / dim as f64, 0.0))
    }

    /// `|k⟩⟨k|` in dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        Self(linalg::basis_projector(dim, k))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn spectrum(&self) -> Spectrum {
        linalg::eigh(&self.0).expect("density matrices are Hermitian")
    }

    /// Eigenvalues sorted descending, with values in `[−τ_psd, 0)` clipped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.0).into_iter().map(|l| l.max(0.0)).collect()
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self::new_unchecked(
            &self.0 * c64(lambda, 0.0) + &other.0 * c64(1.0 - lambda, 0.0),
        ))
    }

    /// `U ρ U*`.
    pub fn conjugate_by(&self, u: &CMat) -> Self {
        Self::new_unchecked(u * &self.0 * u.adjoint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.6, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.2, -0.2]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        let p = ProbabilityVector::new(vec![1.0 + 5e-10, -5e-10]).unwrap();
        assert_eq!(p.as_slice()[1], 0.0);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.5]).is_ok());
        assert!(DensityMatrix::from_diagonal(&[1.5, -0.5]).is_err());
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.4]).is_err());
        let mut m = linalg::real_diag(&[0.5, 0.5]);
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn probability_vector_serde_validates() {
        let p: ProbabilityVector = serde_json::from_str("[0.25,0.75]").unwrap();
        assert_eq!(p.as_slice(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<ProbabilityVector>("[0.6,0.6]").is_err());
    }
}
