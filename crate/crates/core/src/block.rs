//! Orthogonal block decompositions and block-diagonal states `ρ = ⊕ pᵢ ρᵢ`.
//!
//! Blocks are contiguous index ranges of a fixed basis. A block with zero
//! weight carries no conditional state.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::entropy::{shannon_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat};
use crate::state::{DensityMatrix, ProbabilityVector};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockDecomposition {
    dims: Vec<usize>,
}

impl BlockDecomposition {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::validation("blocks", "at least one block is required"));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::validation(format!("blocks[{i}]"), "block dimension must be ≥ 1"));
        }
        Ok(Self { dims })
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Index range of block `i` in the ambient basis.
    pub fn range(&self, i: usize) -> Range<usize> {
        let start: usize = self.dims[..i].iter().sum();
        start..start + self.dims[i]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::DecompositionMismatch(self.dims.clone(), other.dims.clone()));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for BlockDecomposition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BlockDecomposition> for Vec<usize> {
    fn from(d: BlockDecomposition) -> Self {
        d.dims
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockState {
    decomposition: BlockDecomposition,
    weights: ProbabilityVector,
    conditionals: Vec<Option<DensityMatrix>>,
}

impl BlockState {
    pub fn new(
        decomposition: BlockDecomposition,
        weights: ProbabilityVector,
        conditionals: Vec<Option<DensityMatrix>>,
    ) -> Result<Self> {
        let r = decomposition.num_blocks();
        if weights.len() != r || conditionals.len() != r {
            return Err(Error::InvalidBlockState(format!(
                "{r} blocks but {} weights and {} conditionals",
                weights.len(),
                conditionals.len()
            )));
        }
        for (i, c) in conditionals.iter().enumerate() {
            match (weights[i] > 0.0, c) {
                (true, None) => {
                    return Err(Error::InvalidBlockState(format!(
                        "block {i} has weight {} but no conditional state",
                        weights[i]
                    )))
                }
                (false, Some(_)) => {
                    return Err(Error::InvalidBlockState(format!(
                        "block {i} has zero weight but carries a conditional state"
                    )))
                }
                (true, Some(rho)) if rho.dim() != decomposition.dim(i) => {
                    return Err(Error::InvalidBlockState(format!(
                        "block {i} conditional has dim {} (expected {})",
                        rho.dim(),
                        decomposition.dim(i)
                    )))
                }
                _ => {}
            }
        }
        Ok(Self {
            decomposition,
            weights,
            conditionals,
        })
    }

    /// Builds a state from weights and per-block states, dropping conditionals of
    /// zero-weight blocks.
    pub fn from_parts(
        decomposition: BlockDecomposition,
        weights: ProbabilityVector,
        states: Vec<DensityMatrix>,
    ) -> Result<Self> {
        let conditionals = states
            .into_iter()
            .enumerate()
            .map(|(i, s)| (weights.as_slice().get(i).copied().unwrap_or(0.0) > 0.0).then_some(s))
            .collect();
        Self::new(decomposition, weights, conditionals)
    }

    pub fn decomposition(&self) -> &BlockDecomposition {
        &self.decomposition
    }

    pub fn weights(&self) -> &ProbabilityVector {
        &self.weights
    }

    pub fn conditionals(&self) -> &[Option<DensityMatrix>] {
        &self.conditionals
    }

    pub fn conditional(&self, i: usize) -> Option<&DensityMatrix> {
        self.conditionals[i].as_ref()
    }

    /// `pᵢ ρᵢ` as a matrix (zero for absent blocks).
    pub fn weighted_block(&self, i: usize) -> CMat {
        match &self.conditionals[i] {
            Some(rho) => rho.matrix() * c64(self.weights[i], 0.0),
            None => CMat::zeros(self.decomposition.dim(i), self.decomposition.dim(i)),
        }
    }

    /// `λ·self + (1−λ)·other`, re-expressed in block form.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        self.decomposition.check_same(&other.decomposition)?;
        let r = self.decomposition.num_blocks();
        let weights: Vec<f64> = (0..r)
            .map(|i| lambda * self.weights[i] + (1.0 - lambda) * other.weights[i])
            .collect();
        let conditionals = (0..r)
            .map(|i| {
                (weights[i] > 0.0).then(|| {
                    let m = self.weighted_block(i) * c64(lambda, 0.0)
                        + other.weighted_block(i) * c64(1.0 - lambda, 0.0);
                    DensityMatrix::new_unchecked(m * c64(1.0 / weights[i], 0.0))
                })
            })
            .collect();
        Self::new(
            self.decomposition.clone(),
            ProbabilityVector::new_unchecked(weights),
            conditionals,
        )
    }
}

/// True iff every entry outside the diagonal blocks has modulus ≤ `τ_offblock`.
pub fn is_block_diagonal(rho: &DensityMatrix, d: &BlockDecomposition) -> Result<bool> {
    Ok(max_off_block(rho, d)? <= tol::OFFBLOCK)
}

fn max_off_block(rho: &DensityMatrix, d: &BlockDecomposition) -> Result<f64> {
    if rho.dim() != d.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: d.total_dim(),
            found: rho.dim(),
        });
    }
    let owner: Vec<usize> = (0..d.num_blocks())
        .flat_map(|i| std::iter::repeat_n(i, d.dim(i)))
        .collect();
    let m = rho.matrix();
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if owner[i] != owner[j] {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}

/// `pᵢ = Tr Pᵢρ`, `ρᵢ = PᵢρPᵢ / pᵢ`. Blocks with weight below `τ_supp` are treated as empty.
pub fn decompose(rho: &DensityMatrix, d: &BlockDecomposition) -> Result<BlockState> {
    let off = max_off_block(rho, d)?;
    if off > tol::OFFBLOCK {
        return Err(Error::NotBlockDiagonal(off));
    }
    let r = d.num_blocks();
    let mut weights = Vec::with_capacity(r);
    let mut conditionals = Vec::with_capacity(r);
    for i in 0..r {
        let range = d.range(i);
        let block = rho
            .matrix()
            .view((range.start, range.start), (range.len(), range.len()))
            .into_owned();
        let w = linalg::trace(&block).re;
        if w < tol::SUPP {
            weights.push(0.0);
            conditionals.push(None);
        } else {
            weights.push(w);
            conditionals.push(Some(DensityMatrix::new_unchecked(block * c64(1.0 / w, 0.0))));
        }
    }
    BlockState::new(d.clone(), ProbabilityVector::new(weights)?, conditionals)
}

/// `⊕ pᵢ ρᵢ` as a full matrix.
pub fn assemble(bs: &BlockState) -> DensityMatrix {
    let d = bs.decomposition();
    let n = d.total_dim();
    let mut m = CMat::zeros(n, n);
    for i in 0..d.num_blocks() {
        let range = d.range(i);
        m.view_mut((range.start, range.start), (range.len(), range.len()))
            .copy_from(&bs.weighted_block(i));
    }
    DensityMatrix::new_unchecked(m)
}

/// `H(p) + Σ pᵢ S(ρᵢ)`, skipping absent blocks.
pub fn entropy_of_blockstate(bs: &BlockState) -> f64 {
    let inner: f64 = bs
        .conditionals()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.as_ref().map(|rho| bs.weights()[i] * von_neumann_entropy(rho)))
        .sum();
    shannon_entropy(bs.weights()) + inner
}

/// `Σᵢ ‖pᵢρᵢ − qᵢσᵢ‖₁`.
pub fn blockwise_trace_distance(a: &BlockState, b: &BlockState) -> Result<f64> {
    a.decomposition().check_same(b.decomposition())?;
    Ok((0..a.decomposition().num_blocks())
        .map(|i| block_trace_distance(a, b, i))
        .sum())
}

pub(crate) fn block_trace_distance(a: &BlockState, b: &BlockState, i: usize) -> f64 {
    match (a.conditional(i), b.conditional(i)) {
        (None, None) => 0.0,
        (Some(_), None) => a.weights()[i],
        (None, Some(_)) => b.weights()[i],
        (Some(_), Some(_)) => linalg::trace_norm_hermitian(&(a.weighted_block(i) - b.weighted_block(i))),
    }
}

/// Both sides of `‖ρ−σ‖₁² ≤ 2‖p−q‖₁² + 2Σ pᵢ‖ρᵢ−σᵢ‖₁²`.
///
/// A conditional present on only one side is taken equal to the present one,
/// so only its weight difference contributes.
pub fn blockwise_bound_check(a: &BlockState, b: &BlockState) -> Result<(f64, f64)> {
    let lhs = blockwise_trace_distance(a, b)?.powi(2);
    let marginal = a.weights().l1_distance(b.weights());
    let conditional: f64 = (0..a.decomposition().num_blocks())
        .map(|i| match (a.conditional(i), b.conditional(i)) {
            (Some(x), Some(y)) => {
                a.weights()[i] * linalg::trace_norm_hermitian(&(x.matrix() - y.matrix())).powi(2)
            }
            _ => 0.0,
        })
        .sum();
    Ok((lhs, 2.0 * marginal.powi(2) + 2.0 * conditional))
}
