//! Block-convex constraint sets `C = { ⊕ pᵢρᵢ : p ∈ Π, ρᵢ ∈ Cᵢ }`.
//!
//! The marginal polytope `Π` is held as an irredundant vertex list. Conditional
//! sets are either the full state space of the block, a single fixed state, or
//! the convex hull of finitely many generators.
//!
//! Sampling draws flat Dirichlet weights over vertices / generators. This is not
//! uniform on the polytope; it is only meant to cover it.

use rand::Rng;

use crate::block::{BlockDecomposition, BlockState};
use crate::entropy::trace_distance;
use crate::error::{Error, Result};
use crate::hull;
use crate::linalg::{c64, CMat};
use crate::rng::{self, dirichlet_flat, SampleRng};
use crate::state::{DensityMatrix, ProbabilityVector};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalPolytope {
    vertices: Vec<ProbabilityVector>,
}

impl MarginalPolytope {
    /// Builds the polytope, discarding any listed point that is a convex
    /// combination of the remaining ones.
    pub fn new(vertices: Vec<ProbabilityVector>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidPolytope("no vertices".into()));
        };
        let r = first.len();
        if let Some(k) = vertices.iter().position(|v| v.len() != r) {
            return Err(Error::InvalidPolytope(format!(
                "vertex {k} has length {} (expected {r})",
                vertices[k].len()
            )));
        }
        let mut kept = vertices;
        let mut k = 0;
        while k < kept.len() && kept.len() > 1 {
            let others: Vec<Vec<f64>> = kept
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, v)| v.as_slice().to_vec())
                .collect();
            if hull::in_hull(&others, kept[k].as_slice(), tol::MEMB) {
                kept.remove(k);
            } else {
                k += 1;
            }
        }
        Ok(Self { vertices: kept })
    }

    /// The full simplex `Δ_r`.
    pub fn simplex(r: usize) -> Self {
        Self {
            vertices: (0..r).map(|k| ProbabilityVector::point_mass(r, k)).collect(),
        }
    }

    pub fn singleton(q: ProbabilityVector) -> Self {
        Self { vertices: vec![q] }
    }

    pub fn r(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[ProbabilityVector] {
        &self.vertices
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn is_simplex(&self) -> bool {
        let r = self.r();
        self.vertices.len() == r
            && (0..r).all(|k| self.vertices.contains(&ProbabilityVector::point_mass(r, k)))
    }

    fn vertex_rows(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v.as_slice().to_vec()).collect()
    }
}

/// Extreme points of `Π`. The stored vertex list is already irredundant.
pub fn extreme_marginals(pi: &MarginalPolytope) -> Vec<ProbabilityVector> {
    pi.vertices.clone()
}

/// Whether `p` is a convex combination of the vertices of `pi` within `τ_memb`.
pub fn contains(pi: &MarginalPolytope, p: &ProbabilityVector) -> Result<bool> {
    if p.len() != pi.r() {
        return Err(Error::DimensionMismatch {
            expected: pi.r(),
            found: p.len(),
        });
    }
    if pi.is_simplex() {
        return Ok(true);
    }
    Ok(hull::in_hull(&pi.vertex_rows(), p.as_slice(), tol::MEMB))
}

/// `Σ wₖ vertexₖ` with `w` flat-Dirichlet over the vertices.
pub fn sample_marginal(pi: &MarginalPolytope, seed: u64) -> ProbabilityVector {
    sample_marginal_with(pi, &mut rng::rng_for(seed, 0))
}

pub fn sample_marginal_with<R: Rng + ?Sized>(pi: &MarginalPolytope, rng: &mut R) -> ProbabilityVector {
    let w = dirichlet_flat(rng, pi.vertices.len());
    let r = pi.r();
    let mut p = vec![0.0; r];
    for (wk, v) in w.iter().zip(&pi.vertices) {
        for i in 0..r {
            p[i] += wk * v[i];
        }
    }
    let total: f64 = p.iter().sum();
    ProbabilityVector::new_unchecked(p.into_iter().map(|x| x / total).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionalSet {
    /// Every state of the block.
    Full,
    Singleton(DensityMatrix),
    Hull(Vec<DensityMatrix>),
}

impl ConditionalSet {
    pub fn kind(&self) -> &'static str {
        match self {
            ConditionalSet::Full => "full",
            ConditionalSet::Singleton(_) => "fixed",
            ConditionalSet::Hull(_) => "hull",
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        let bad = match self {
            ConditionalSet::Full => None,
            ConditionalSet::Singleton(s) => (s.dim() != dim).then_some(s.dim()),
            ConditionalSet::Hull(gens) => {
                if gens.is_empty() {
                    return Err(Error::validation("matrices", "hull needs at least one generator"));
                }
                gens.iter().map(|g| g.dim()).find(|&d| d != dim)
            }
        };
        match bad {
            Some(found) => Err(Error::DimensionMismatch { expected: dim, found }),
            None => Ok(()),
        }
    }
}

/// Real coordinates of a complex matrix (real parts, then imaginary parts).
fn realify(m: &CMat) -> Vec<f64> {
    m.iter().map(|z| z.re).chain(m.iter().map(|z| z.im)).collect()
}

/// Full → `GG*/Tr(GG*)`; Singleton → the state; Hull → Dirichlet mixture of generators.
pub fn sample_conditional(c: &ConditionalSet, dim: usize, seed: u64) -> DensityMatrix {
    sample_conditional_with(c, dim, &mut rng::rng_for(seed, 0))
}

pub fn sample_conditional_with<R: Rng + ?Sized>(c: &ConditionalSet, dim: usize, rng: &mut R) -> DensityMatrix {
    match c {
        ConditionalSet::Full => rng::random_density(rng, dim),
        ConditionalSet::Singleton(s) => s.clone(),
        ConditionalSet::Hull(gens) => {
            let w = dirichlet_flat(rng, gens.len());
            let mut m = CMat::zeros(dim, dim);
            for (wk, g) in w.iter().zip(gens) {
                m += g.matrix() * c64(*wk, 0.0);
            }
            DensityMatrix::new_unchecked(m)
        }
    }
}

/// Whether `rho` lies in `c` within `τ_memb`.
pub fn conditional_contains(c: &ConditionalSet, rho: &DensityMatrix) -> bool {
    match c {
        ConditionalSet::Full => true,
        ConditionalSet::Singleton(s) => {
            trace_distance(s, rho).map(|d| d <= tol::MEMB).unwrap_or(false)
        }
        ConditionalSet::Hull(gens) => {
            if gens.iter().any(|g| g.dim() != rho.dim()) {
                return false;
            }
            let pts: Vec<Vec<f64>> = gens.iter().map(|g| realify(g.matrix())).collect();
            hull::in_hull(&pts, &realify(rho.matrix()), tol::MEMB)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockConvexSet {
    decomposition: BlockDecomposition,
    marginal: MarginalPolytope,
    conditionals: Vec<ConditionalSet>,
}

impl BlockConvexSet {
    pub fn new(
        decomposition: BlockDecomposition,
        marginal: MarginalPolytope,
        conditionals: Vec<ConditionalSet>,
    ) -> Result<Self> {
        let r = decomposition.num_blocks();
        if marginal.r() != r {
            return Err(Error::validation(
                "marginal",
                format!("polytope lives in Δ_{} but there are {r} blocks", marginal.r()),
            ));
        }
        if conditionals.len() != r {
            return Err(Error::validation(
                "conditionals",
                format!("{} conditional sets for {r} blocks", conditionals.len()),
            ));
        }
        for (i, c) in conditionals.iter().enumerate() {
            c.check_dim(decomposition.dim(i))
                .map_err(|e| Error::validation(format!("conditionals[{i}]"), e))?;
        }
        Ok(Self {
            decomposition,
            marginal,
            conditionals,
        })
    }

    pub fn decomposition(&self) -> &BlockDecomposition {
        &self.decomposition
    }

    pub fn marginal(&self) -> &MarginalPolytope {
        &self.marginal
    }

    pub fn conditionals(&self) -> &[ConditionalSet] {
        &self.conditionals
    }

    pub fn all_full(&self) -> bool {
        self.conditionals.iter().all(|c| matches!(c, ConditionalSet::Full))
    }
}

pub fn sample_member(c: &BlockConvexSet, seed: u64) -> BlockState {
    sample_member_with(c, &mut rng::rng_for(seed, 0))
}

pub fn sample_member_with(c: &BlockConvexSet, rng: &mut SampleRng) -> BlockState {
    let p = sample_marginal_with(&c.marginal, rng);
    let states = c
        .conditionals
        .iter()
        .enumerate()
        .map(|(i, set)| sample_conditional_with(set, c.decomposition.dim(i), rng))
        .collect();
    BlockState::from_parts(c.decomposition.clone(), p, states).expect("sampled parts are consistent")
}

pub fn member_check(c: &BlockConvexSet, bs: &BlockState) -> Result<bool> {
    if bs.decomposition() != &c.decomposition {
        return Err(Error::DecompositionMismatch(
            c.decomposition.dims().to_vec(),
            bs.decomposition().dims().to_vec(),
        ));
    }
    if !contains(&c.marginal, bs.weights())? {
        return Ok(false);
    }
    Ok(c
        .conditionals
        .iter()
        .zip(bs.conditionals())
        .all(|(set, rho)| rho.as_ref().is_none_or(|rho| conditional_contains(set, rho))))
}
