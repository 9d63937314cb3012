//! Exact entropy minimization over a block-convex set and the trace distance to
//! its minimizer set `M`.
//!
//! Entropy splits as `S(⊕pᵢρᵢ) = H(p) + Σ pᵢS(ρᵢ)`, which is concave in `p` and
//! in each `ρᵢ`, so minimizers sit at a vertex `q` of `Π` with every occupied
//! block at a minimum-entropy element of its conditional set.

use serde::Serialize;

use crate::block::BlockState;
use crate::constraint::{extreme_marginals, member_check, BlockConvexSet, ConditionalSet};
use crate::entropy::{shannon_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat};
use crate::state::{DensityMatrix, ProbabilityVector};
use crate::tol;

/// Minimum-entropy elements of one conditional set.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockMinimizers {
    /// Every pure state of the block.
    AnyPure,
    /// The single fixed state.
    Fixed(DensityMatrix),
    /// Hull generators tied at the minimum entropy; the first is the witness.
    Generators(Vec<DensityMatrix>),
}

impl BlockMinimizers {
    pub fn witness(&self, dim: usize) -> DensityMatrix {
        match self {
            BlockMinimizers::AnyPure => DensityMatrix::basis_state(dim, 0),
            BlockMinimizers::Fixed(s) => s.clone(),
            BlockMinimizers::Generators(g) => g[0].clone(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BlockMinimizers::AnyPure => "any pure state",
            BlockMinimizers::Fixed(_) => "fixed state",
            BlockMinimizers::Generators(_) => "hull generator",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerDescription {
    pub s_min: f64,
    pub minimizing_marginals: Vec<ProbabilityVector>,
    pub per_block_min_entropy: Vec<f64>,
    pub per_block_minimizers: Vec<BlockMinimizers>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerSummary {
    pub s_min: f64,
    pub minimizing_marginals: Vec<Vec<f64>>,
    pub per_block_min_entropy: Vec<f64>,
    pub per_block_witness: Vec<&'static str>,
}

impl MinimizerDescription {
    pub fn summary(&self) -> MinimizerSummary {
        MinimizerSummary {
            s_min: self.s_min,
            minimizing_marginals: self
                .minimizing_marginals
                .iter()
                .map(|q| q.as_slice().to_vec())
                .collect(),
            per_block_min_entropy: self.per_block_min_entropy.clone(),
            per_block_witness: self.per_block_minimizers.iter().map(|b| b.label()).collect(),
        }
    }
}

/// Minimum entropy over one conditional set, with the set of minimizing elements.
pub fn conditional_min_entropy(c: &ConditionalSet) -> (f64, BlockMinimizers) {
    match c {
        ConditionalSet::Full => (0.0, BlockMinimizers::AnyPure),
        ConditionalSet::Singleton(s) => (von_neumann_entropy(s), BlockMinimizers::Fixed(s.clone())),
        ConditionalSet::Hull(gens) => {
            let entropies: Vec<f64> = gens.iter().map(von_neumann_entropy).collect();
            let min = entropies.iter().copied().fold(f64::INFINITY, f64::min);
            let tied = gens
                .iter()
                .zip(&entropies)
                .filter(|(_, &s)| s <= min + tol::TIE)
                .map(|(g, _)| g.clone())
                .collect();
            (min, BlockMinimizers::Generators(tied))
        }
    }
}

/// The marginal objective `H(q) + Σ qᵢ·mᵢ` for block minima `m`.
pub fn marginal_objective(q: &[f64], block_min: &[f64]) -> f64 {
    let h = crate::entropy::shannon_of_slice(q);
    h + q.iter().zip(block_min).map(|(qi, mi)| qi * mi).sum::<f64>()
}

pub fn minimize_entropy(c: &BlockConvexSet) -> MinimizerDescription {
    let (per_block_min_entropy, per_block_minimizers): (Vec<f64>, Vec<BlockMinimizers>) =
        c.conditionals().iter().map(conditional_min_entropy).unzip();
    let vertices = extreme_marginals(c.marginal());
    let values: Vec<f64> = vertices
        .iter()
        .map(|q| shannon_entropy(q) + q.as_slice().iter().zip(&per_block_min_entropy).map(|(qi, mi)| qi * mi).sum::<f64>())
        .collect();
    let s_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let minimizing_marginals = vertices
        .into_iter()
        .zip(&values)
        .filter(|(_, &v)| v <= s_min + tol::TIE)
        .map(|(q, _)| q)
        .collect();
    MinimizerDescription {
        s_min,
        minimizing_marginals,
        per_block_min_entropy,
        per_block_minimizers,
    }
}

/// Top-eigenvector projector `P` of `rho_i` and `‖pᵢρᵢ − qᵢP‖₁`.
///
/// Exact in dimension 2; in higher dimensions this is a candidate and the
/// distance an upper bound on the best pure-state distance.
pub fn nearest_pure_block(rho_i: &DensityMatrix, p_i: f64, q_i: f64) -> Result<(DensityMatrix, f64)> {
    for (name, w) in [("p_i", p_i), ("q_i", q_i)] {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidState(format!("{name} = {w} outside [0, 1]")));
        }
    }
    let spec = rho_i.spectrum();
    let proj = DensityMatrix::new_unchecked(linalg::projector(&spec.eigenvector(0)));
    let dist = linalg::trace_norm_hermitian(&(rho_i.matrix() * c64(p_i, 0.0) - proj.matrix() * c64(q_i, 0.0)));
    Ok((proj, dist))
}

fn weighted_distance(p_i: f64, rho_i: Option<&DensityMatrix>, q_i: f64, sigma: &CMat) -> f64 {
    match rho_i {
        Some(rho) => linalg::trace_norm_hermitian(&(rho.matrix() * c64(p_i, 0.0) - sigma * c64(q_i, 0.0))),
        None => q_i,
    }
}

fn combine(gens: &[DensityMatrix], w: &[f64]) -> CMat {
    let dim = gens[0].dim();
    let mut m = CMat::zeros(dim, dim);
    for (g, &wk) in gens.iter().zip(w) {
        if wk != 0.0 {
            m += g.matrix() * c64(wk, 0.0);
        }
    }
    m
}

/// Nearest minimum-entropy hull element: start at the closest tied generator and
/// run coordinate descent over convex weights of the tied generators, rejecting
/// any mixture whose entropy leaves the minimum.
fn nearest_hull_minimizer(
    gens: &[DensityMatrix],
    min_entropy: f64,
    p_i: f64,
    rho_i: Option<&DensityMatrix>,
    q_i: f64,
) -> (DensityMatrix, f64) {
    let dists: Vec<f64> = gens
        .iter()
        .map(|g| weighted_distance(p_i, rho_i, q_i, g.matrix()))
        .collect();
    let best = (0..gens.len())
        .min_by(|&a, &b| dists[a].total_cmp(&dists[b]))
        .expect("hull has generators");
    let mut w = vec![0.0; gens.len()];
    w[best] = 1.0;
    let mut current = dists[best];
    if gens.len() > 1 {
        let eval = |w: &[f64]| -> f64 {
            let m = combine(gens, w);
            let s = crate::entropy::shannon_of_slice(
                &linalg::eigvalsh(&m).into_iter().map(|l| l.max(0.0)).collect::<Vec<_>>(),
            );
            if s > min_entropy + tol::TIE {
                f64::INFINITY
            } else {
                weighted_distance(p_i, rho_i, q_i, &m)
            }
        };
        for _ in 0..100 {
            let before = current;
            for k in 0..gens.len() {
                let shifted = |t: f64| -> Vec<f64> {
                    w.iter()
                        .enumerate()
                        .map(|(j, &wj)| (1.0 - t) * wj + if j == k { t } else { 0.0 })
                        .collect()
                };
                let (t, val) = golden_section(|t| eval(&shifted(t)), 0.0, 1.0, 60);
                if val < current {
                    w = shifted(t);
                    current = val;
                }
            }
            if before - current < 1e-10 {
                break;
            }
        }
    }
    (DensityMatrix::new_unchecked(combine(gens, &w)), current)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `dist₁(ρ, M)` together with the minimizer attaining it.
///
/// For full conditional sets the inner minimization over pure states uses
/// [`nearest_pure_block`], so in block dimensions ≥ 3 the result is an upper bound.
pub fn distance_to_minimizers(
    c: &BlockConvexSet,
    bs: &BlockState,
    md: &MinimizerDescription,
) -> Result<(f64, BlockState)> {
    if !member_check(c, bs)? {
        return Err(Error::NotAMember("state lies outside the constraint set".into()));
    }
    Ok(distance_to_minimizers_unchecked(c, bs, md))
}

/// [`distance_to_minimizers`] without the membership test.
pub fn distance_to_minimizers_unchecked(
    c: &BlockConvexSet,
    bs: &BlockState,
    md: &MinimizerDescription,
) -> (f64, BlockState) {
    let d = c.decomposition();
    let r = d.num_blocks();
    let p = bs.weights();
    let mut best: Option<(f64, BlockState)> = None;
    for q in &md.minimizing_marginals {
        let mut total = 0.0;
        let mut states = Vec::with_capacity(r);
        for i in 0..r {
            let rho_i = bs.conditional(i);
            if q[i] == 0.0 {
                total += if rho_i.is_some() { p[i] } else { 0.0 };
                states.push(None);
                continue;
            }
            let (sigma, dist) = match &md.per_block_minimizers[i] {
                BlockMinimizers::AnyPure => match rho_i {
                    Some(rho) => nearest_pure_block(rho, p[i], q[i]).expect("weights in [0, 1]"),
                    None => (DensityMatrix::basis_state(d.dim(i), 0), q[i]),
                },
                BlockMinimizers::Fixed(s) => (s.clone(), weighted_distance(p[i], rho_i, q[i], s.matrix())),
                BlockMinimizers::Generators(gens) => {
                    nearest_hull_minimizer(gens, md.per_block_min_entropy[i], p[i], rho_i, q[i])
                }
            };
            total += dist;
            states.push(Some(sigma));
        }
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            let nearest = BlockState::new(d.clone(), q.clone(), states).expect("minimizer parts are consistent");
            best = Some((total, nearest));
        }
    }
    best.expect("at least one minimizing marginal")
}
