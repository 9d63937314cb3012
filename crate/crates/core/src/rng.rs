//! Seeded, counter-keyed randomness.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by
//! `(seed, stream)`, so sample `i` of a run is the same no matter which thread
//! evaluates it or how many samples are requested in total.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::linalg::{c64, CMat, CVec};
use crate::state::DensityMatrix;

pub type SampleRng = ChaCha8Rng;

/// Stream offsets so that different workflows sharing one seed never overlap.
pub mod streams {
    pub const MEMBER: u64 = 0;
    pub const NEAR_MINIMIZER: u64 = 1 << 40;
    pub const C1: u64 = 2 << 40;
    pub const SELFTEST: u64 = 3 << 40;
}

pub fn rng_for(seed: u64, stream: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Flat Dirichlet weights of length `n` (normalised exponentials).
pub fn dirichlet_flat<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `G G* / Tr(G G*)` for a square complex Gaussian `G` (Hilbert–Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = complex_gaussian_matrix(rng, dim, dim);
    let gg = &g * g.adjoint();
    let tr = crate::linalg::trace(&gg).re;
    DensityMatrix::new_unchecked(gg * c64(1.0 / tr, 0.0))
}

/// Density matrix with full support: mixes a random state with the maximally mixed one.
pub fn random_full_support_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let rho = random_density(rng, dim);
    let mix = rng.random_range(0.01..0.99);
    rho.mix(&DensityMatrix::maximally_mixed(dim), 1.0 - mix)
        .expect("same dimension")
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVec {
    let v = complex_gaussian_matrix(rng, dim, 1).column(0).into_owned();
    let n = v.norm();
    v / c64(n, 0.0)
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    DensityMatrix::new_unchecked(crate::linalg::projector(&random_unit_vector(rng, dim)))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the diagonal phase fixed.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMat {
    let g = complex_gaussian_matrix(rng, dim, dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c64(d.norm(), 0.0) } else { c64(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Log-uniform draw in `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let t: f64 = rng.random();
    (lo.ln() + t * (hi.ln() - lo.ln())).exp()
}
