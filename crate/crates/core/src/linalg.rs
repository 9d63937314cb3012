//! Dense complex linear algebra on small Hermitian matrices.
//!
//! Everything here is backed by `nalgebra`; the Hermitian eigensolver is the
//! only nontrivial routine and its output is normalised to descending order.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: CMat,
}

impl Spectrum {
    /// `Σ λₖ vₖ vₖ*`.
    pub fn reconstruct(&self) -> CMat {
        let n = self.eigenvalues.len();
        let mut out = CMat::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(k);
            out += (v * v.adjoint()) * c64(lam, 0.0);
        }
        out
    }

    pub fn eigenvector(&self, k: usize) -> CVec {
        self.eigenvectors.column(k).into_owned()
    }
}

/// Largest `|a_ij − conj(a_ji)|`.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m*) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
pub fn eigh(m: &CMat) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let dev = hermitian_deviation(m);
    if dev > tol::HERM {
        return Err(Error::NonHermitianInput(dev));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: CMat::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, sorted descending. The input is symmetrised first, so
/// callers must have validated Hermiticity.
pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut vals: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Schatten-1 norm of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    eigvalsh(m).iter().map(|l| l.abs()).sum()
}

/// `|v⟩⟨v|` for a (not necessarily normalised) vector, normalised to unit trace.
pub fn projector(v: &CVec) -> CMat {
    let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    (v * v.adjoint()) * c64(1.0 / norm2, 0.0)
}

/// Projector onto the `k`-th standard basis vector of dimension `dim`.
pub fn basis_projector(dim: usize, k: usize) -> CMat {
    let mut m = CMat::zeros(dim, dim);
    m[(k, k)] = c64(1.0, 0.0);
    m
}

pub fn real_diag(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = CMat::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = c64(v, 0.0);
    }
    m
}

/// Largest entry modulus of `a − b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
