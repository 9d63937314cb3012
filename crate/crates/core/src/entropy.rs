//! Entropies, trace distance and purity. All logarithms are natural.

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::{DensityMatrix, ProbabilityVector};
use crate::tol;

/// `−x log x` with `0 log 0 = 0`; negatives are clipped.
#[inline]
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Shannon entropy of a raw weight slice. Used where the caller has already validated.
pub fn shannon_of_slice(p: &[f64]) -> f64 {
    p.iter().map(|&x| eta(x)).sum()
}

/// `H(p) = −Σ pᵢ log pᵢ`.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    shannon_of_slice(p.as_slice())
}

/// `S(ρ) = −Tr ρ log ρ`, computed as the Shannon entropy of the spectrum.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    if rho.dim() == 1 {
        return 0.0;
    }
    shannon_of_slice(&rho.eigenvalues())
}

/// `D(ρ‖σ) = Tr ρ(log ρ − log σ)`; `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let spec = sigma.spectrum();
    let mut cross = 0.0;
    let mut off_support = 0.0;
    for (k, &lam) in spec.eigenvalues.iter().enumerate() {
        let v = spec.eigenvectors.column(k);
        let weight = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if lam > tol::SUPP {
            cross += weight * lam.ln();
        } else {
            off_support += weight;
        }
    }
    if off_support > tol::SUPP {
        return Ok(f64::INFINITY);
    }
    let neg_entropy = -von_neumann_entropy(rho);
    Ok((neg_entropy - cross).max(0.0))
}

/// `‖a − b‖₁`, the sum of absolute eigenvalues of the difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(linalg::trace_norm_hermitian(&(a.matrix() - b.matrix())))
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// `1 / Tr ρ²`.
pub fn effective_dimension(rho: &DensityMatrix) -> f64 {
    1.0 / purity(rho)
}

/// Lower bounds on `max pᵢ`: `e^{−H(p)}` and the support-size variant `e^{−H(p)}/r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxMassBounds {
    pub lower_exp: f64,
    pub lower_refined: f64,
}

pub fn max_mass_bounds(p: &ProbabilityVector) -> MaxMassBounds {
    let e = (-shannon_entropy(p)).exp();
    MaxMassBounds {
        lower_exp: e,
        lower_refined: e / p.len() as f64,
    }
}

/// Binary entropy `h(x) = −x log x − (1−x) log(1−x)`.
pub fn binary_entropy(x: f64) -> f64 {
    eta(x) + eta(1.0 - x)
}
