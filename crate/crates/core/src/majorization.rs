//! Majorization of spectra.
//!
//! `x ≻ y` when the descending partial sums of `x` dominate those of `y` and the
//! totals agree. Shorter vectors are padded with zeros.

use serde::Serialize;

use crate::block::BlockState;

fn sorted_desc(v: &[f64], len: usize) -> Vec<f64> {
    let mut out: Vec<f64> = v.to_vec();
    out.resize(len, 0.0);
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Whether `x ≻ y` up to `tol` on every partial sum.
pub fn majorizes(x: &[f64], y: &[f64], tol: f64) -> bool {
    let n = x.len().max(y.len());
    let (xs, ys) = (sorted_desc(x, n), sorted_desc(y, n));
    let mut sx = 0.0;
    let mut sy = 0.0;
    for k in 0..n {
        sx += xs[k];
        sy += ys[k];
        if sx < sy - tol {
            return false;
        }
    }
    (sx - sy).abs() <= tol
}

/// Eigenvalues of `⊕ pᵢρᵢ`, computed block by block.
pub fn block_spectrum(bs: &BlockState) -> Vec<f64> {
    let mut out = Vec::with_capacity(bs.decomposition().total_dim());
    for (i, c) in bs.conditionals().iter().enumerate() {
        match c {
            Some(rho) => out.extend(rho.eigenvalues().into_iter().map(|l| l * bs.weights()[i])),
            None => out.extend(std::iter::repeat_n(0.0, bs.decomposition().dim(i))),
        }
    }
    out
}

/// Outcome of comparing a minimizer's spectrum with a member's spectrum in both directions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MajorizationTally {
    pub pairs: usize,
    /// Pairs where the minimizer's spectrum fails to majorize the member's.
    pub minimizer_not_majorizing: usize,
    /// Pairs where the member's spectrum fails to majorize the minimizer's.
    pub member_not_majorizing: usize,
}

impl MajorizationTally {
    pub fn record(&mut self, minimizer: &[f64], member: &[f64], tol: f64) {
        self.pairs += 1;
        if !majorizes(minimizer, member, tol) {
            self.minimizer_not_majorizing += 1;
        }
        if !majorizes(member, minimizer, tol) {
            self.member_not_majorizing += 1;
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.pairs += other.pairs;
        self.minimizer_not_majorizing += other.minimizer_not_majorizing;
        self.member_not_majorizing += other.member_not_majorizing;
        self
    }
}
