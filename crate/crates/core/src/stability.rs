//! Monte-Carlo checks of the quadratic stability bound
//! `S(ρ) − S_min ≥ C·dist₁(ρ, M)²`, constant estimation, and sharpness families.
//!
//! Every sample is keyed by `(seed, index)` and evaluated independently; the
//! per-sample outcomes are collected in index order and reduced sequentially,
//! so reports do not depend on thread scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::block::{blockwise_trace_distance, entropy_of_blockstate, BlockState};
use crate::constraint::{contains, sample_marginal_with, sample_member_with, BlockConvexSet, MarginalPolytope};
use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::majorization::{block_spectrum, MajorizationTally};
use crate::minimizer::{distance_to_minimizers, marginal_objective, minimize_entropy, BlockMinimizers, MinimizerDescription};
use crate::report::serialize_extended;
use crate::rng::{self, streams};
use crate::state::{DensityMatrix, ProbabilityVector};
use crate::tol;

/// Empirical marginal rigidity constant, or the marker for a singleton polytope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C1Estimate {
    Value(f64),
    NotApplicable,
}

impl Serialize for C1Estimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            C1Estimate::Value(v) => s.serialize_f64(*v),
            C1Estimate::NotApplicable => s.serialize_str("not-applicable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub s_min: f64,
    pub c1_estimate: C1Estimate,
    pub assembled_c: f64,
    pub samples: usize,
    /// Samples whose distance to `M` exceeded the skip threshold.
    pub ratio_samples: usize,
    /// `inf gap/dist²` over `ratio_samples`; `None` when every sample sat on `M`.
    pub min_ratio: Option<f64>,
    pub violations: usize,
    pub empirical_best_c: Option<f64>,
    /// Samples with `S < S_min − τ_viol`.
    pub minimality_violations: usize,
    /// Violations of `dist ≤ √(2r·gap)`; only checked for uniform fixed populations.
    pub sqrt_bound_violations: Option<usize>,
    pub majorization: MajorizationTally,
    pub seed: u64,
}

impl StabilityReport {
    pub fn summary_line(&self) -> String {
        format!(
            "s_min={:.12} C={:.6} violations={} min_ratio={} samples={}",
            self.s_min,
            self.assembled_c,
            self.violations,
            self.min_ratio.map_or("n/a".into(), |r| format!("{r:.6}")),
            self.samples
        )
    }
}

/// Classification of a fitted exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentClass {
    Linear,
    Quadratic,
    Other,
}

impl ExponentClass {
    pub fn of(exponent: f64) -> Self {
        if (0.9..=1.1).contains(&exponent) {
            ExponentClass::Linear
        } else if (1.8..=2.2).contains(&exponent) {
            ExponentClass::Quadratic
        } else {
            ExponentClass::Other
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub epsilons: Vec<f64>,
    pub gaps: Vec<f64>,
    pub distances: Vec<f64>,
    pub fitted_exponent: f64,
    /// `−Σ vᵢ log qᵢ`; `+∞` when `v` moves mass onto a zero coordinate of `q`.
    #[serde(serialize_with = "serialize_extended")]
    pub directional_derivative: f64,
    pub derivative_divergent: bool,
    pub exponent_class: ExponentClass,
}

impl SharpnessReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("distance,gap\n");
        for (d, g) in self.distances.iter().zip(&self.gaps) {
            out.push_str(&format!("{d:e},{g:e}\n"));
        }
        out
    }
}

/// Classical family plus its block-diagonal lift and the identity residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumSharpnessReport {
    pub classical: SharpnessReport,
    pub quantum: SharpnessReport,
    /// `max |gap_quantum − gap_classical|`.
    pub gap_residual: f64,
    /// `max |dist₁(ρ_ε, M) − dist₁(p_ε, Q*)|`.
    pub distance_residual: f64,
    /// `max |‖ρ_ε − σ_q‖₁ − ‖p_ε − q‖₁|`.
    pub reference_distance_residual: f64,
}

/// `½·min{c₁, ½}`; `¼` when there is no marginal term.
pub fn assemble_constant(c1: C1Estimate) -> f64 {
    match c1 {
        C1Estimate::Value(c) => 0.5 * c.min(0.5),
        C1Estimate::NotApplicable => 0.25,
    }
}

/// Empirical `inf (H(p) − H_min) / dist₁(p, Q*)²` over sampled `p ∈ Π`.
pub fn estimate_c1(pi: &MarginalPolytope, minimizing: &[ProbabilityVector], n_samples: usize, seed: u64) -> C1Estimate {
    estimate_c1_weighted(pi, minimizing, &vec![0.0; pi.r()], n_samples, seed)
}

/// As [`estimate_c1`], with the marginal objective `H(p) + Σ pᵢ mᵢ` for block
/// minimum entropies `m` (all zero when every conditional set admits pure states).
pub fn estimate_c1_weighted(
    pi: &MarginalPolytope,
    minimizing: &[ProbabilityVector],
    block_min: &[f64],
    n_samples: usize,
    seed: u64,
) -> C1Estimate {
    if pi.is_singleton() || minimizing.is_empty() {
        return C1Estimate::NotApplicable;
    }
    let f_min = minimizing
        .iter()
        .map(|q| marginal_objective(q.as_slice(), block_min))
        .fold(f64::INFINITY, f64::min);
    let ratios: Vec<Option<f64>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|k| {
            let p = sample_marginal_with(pi, &mut rng::rng_for(seed, streams::C1 + k));
            let dist = minimizing.iter().map(|q| p.l1_distance(q)).fold(f64::INFINITY, f64::min);
            (dist >= tol::DIST_SKIP).then(|| (marginal_objective(p.as_slice(), block_min) - f_min) / (dist * dist))
        })
        .collect();
    let inf = ratios.into_iter().flatten().fold(f64::INFINITY, f64::min);
    if inf.is_finite() {
        C1Estimate::Value(inf.max(0.0))
    } else {
        C1Estimate::NotApplicable
    }
}

/// A random element of `M`.
pub fn sample_minimizer<R: Rng + ?Sized>(c: &BlockConvexSet, md: &MinimizerDescription, rng: &mut R) -> BlockState {
    let q = &md.minimizing_marginals[rng.random_range(0..md.minimizing_marginals.len())];
    let states = md
        .per_block_minimizers
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let dim = c.decomposition().dim(i);
            match b {
                BlockMinimizers::AnyPure => rng::random_pure_state(rng, dim),
                BlockMinimizers::Fixed(s) => s.clone(),
                BlockMinimizers::Generators(g) => g[rng.random_range(0..g.len())].clone(),
            }
        })
        .collect();
    BlockState::from_parts(c.decomposition().clone(), q.clone(), states).expect("minimizer parts are consistent")
}

/// Sample `index` of a verification run: even indices are plain members, odd
/// indices mix a minimizer with a member at log-uniform weight in `[1e−6, 1e−1]`.
pub fn verification_sample(c: &BlockConvexSet, md: &MinimizerDescription, seed: u64, index: u64) -> BlockState {
    if index.is_multiple_of(2) {
        sample_member_with(c, &mut rng::rng_for(seed, streams::MEMBER + index))
    } else {
        let mut rng = rng::rng_for(seed, streams::NEAR_MINIMIZER + index);
        let sigma = sample_minimizer(c, md, &mut rng);
        let member = sample_member_with(c, &mut rng);
        let u = rng::log_uniform(&mut rng, 1e-6, 1e-1);
        sigma.mix(&member, 1.0 - u).expect("same decomposition")
    }
}

#[derive(Debug, Clone, Copy)]
struct SampleOutcome {
    gap: f64,
    dist: f64,
    tally: MajorizationTally,
}

pub(crate) struct VerifyConfig {
    pub assembled_c: f64,
    pub c1: C1Estimate,
    pub sqrt_bound_blocks: Option<usize>,
}

pub(crate) fn run_verification(
    c: &BlockConvexSet,
    md: &MinimizerDescription,
    cfg: VerifyConfig,
    n_samples: usize,
    seed: u64,
) -> Result<StabilityReport> {
    let outcomes: Vec<Result<SampleOutcome>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let bs = verification_sample(c, md, seed, i);
            let gap = entropy_of_blockstate(&bs) - md.s_min;
            let (dist, nearest) = distance_to_minimizers(c, &bs, md)
                .map_err(|e| Error::Numerical(format!("sample {i}: {e}")))?;
            let mut tally = MajorizationTally::default();
            tally.record(&block_spectrum(&nearest), &block_spectrum(&bs), 1e-9);
            Ok(SampleOutcome { gap, dist, tally })
        })
        .collect();

    let mut min_ratio = f64::INFINITY;
    let mut ratio_samples = 0;
    let mut violations = 0;
    let mut minimality_violations = 0;
    let mut sqrt_violations = 0;
    let mut tally = MajorizationTally::default();
    for o in outcomes {
        let o = o?;
        if o.gap < -tol::VIOL {
            minimality_violations += 1;
        }
        if o.gap < cfg.assembled_c * o.dist * o.dist - tol::VIOL {
            violations += 1;
        }
        if let Some(r) = cfg.sqrt_bound_blocks {
            if o.dist > (2.0 * r as f64 * o.gap.max(0.0)).sqrt() + 1e-6 {
                sqrt_violations += 1;
            }
        }
        if o.dist >= tol::DIST_SKIP {
            ratio_samples += 1;
            min_ratio = min_ratio.min(o.gap / (o.dist * o.dist));
        }
        tally = tally.merge(o.tally);
    }
    let min_ratio = (ratio_samples > 0).then(|| min_ratio.max(0.0));
    Ok(StabilityReport {
        s_min: md.s_min,
        c1_estimate: cfg.c1,
        assembled_c: cfg.assembled_c,
        samples: n_samples,
        ratio_samples,
        min_ratio,
        violations,
        empirical_best_c: min_ratio,
        minimality_violations,
        sqrt_bound_violations: cfg.sqrt_bound_blocks.map(|_| sqrt_violations),
        majorization: tally,
        seed,
    })
}

/// Samples `n_samples` members (half of them near minimizers) and checks
/// `gap ≥ C·dist²` against the assembled constant.
pub fn verify_stability(c: &BlockConvexSet, n_samples: usize, seed: u64) -> Result<StabilityReport> {
    if n_samples == 0 {
        return Err(Error::validation("samples", "must be ≥ 1"));
    }
    let md = minimize_entropy(c);
    let c1 = estimate_c1_weighted(
        c.marginal(),
        &md.minimizing_marginals,
        &md.per_block_min_entropy,
        n_samples,
        seed,
    );
    let cfg = VerifyConfig {
        assembled_c: assemble_constant(c1),
        c1,
        sqrt_bound_blocks: None,
    };
    run_verification(c, &md, cfg, n_samples, seed)
}

/// Least-squares slope of `log gap` against `log distance`.
///
/// Points with a non-positive gap or distance are dropped; at least four must
/// remain and their distances must span two decades.
pub fn fit_exponent(distances: &[f64], gaps: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = distances
        .iter()
        .zip(gaps)
        .filter(|(d, g)| **d > 0.0 && **g > 0.0)
        .map(|(d, g)| (d.ln(), g.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientLadder(format!("{} usable points (need 4)", pts.len())));
    }
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (x, _)| (lo.min(*x), hi.max(*x)));
    if (hi - lo) / std::f64::consts::LN_10 < 2.0 - 1e-9 {
        return Err(Error::InsufficientLadder("distances span less than two decades".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

fn check_direction(r: usize, v: &[f64], epsilons: &[f64]) -> Result<()> {
    if v.len() != r {
        return Err(Error::validation("v", format!("length {} (expected {r})", v.len())));
    }
    let s: f64 = v.iter().sum();
    if s.abs() > 1e-12 {
        return Err(Error::validation("v", format!("components sum to {s} (must be 0)")));
    }
    if epsilons.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InsufficientLadder("epsilons must be strictly decreasing".into()));
    }
    Ok(())
}

fn perturbed(pi: &MarginalPolytope, q: &ProbabilityVector, v: &[f64], eps: f64) -> Result<ProbabilityVector> {
    let p: Vec<f64> = q.as_slice().iter().zip(v).map(|(qi, vi)| qi + eps * vi).collect();
    let p = ProbabilityVector::new(p).map_err(|_| Error::InfeasibleDirection(eps))?;
    if !contains(pi, &p)? {
        return Err(Error::InfeasibleDirection(eps));
    }
    Ok(p)
}

/// `−Σ vᵢ log qᵢ`, with a divergence flag when some `vᵢ ≠ 0` meets `qᵢ = 0`.
pub fn directional_derivative(q: &ProbabilityVector, v: &[f64]) -> (f64, bool) {
    let mut sum = 0.0;
    for (qi, vi) in q.as_slice().iter().zip(v) {
        if *vi == 0.0 {
            continue;
        }
        if *qi <= 0.0 {
            let inf = if *vi > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
            return (inf, true);
        }
        sum -= vi * qi.ln();
    }
    (sum, false)
}

fn classical_minimizers(pi: &MarginalPolytope) -> (f64, Vec<ProbabilityVector>) {
    let h: Vec<f64> = pi.vertices().iter().map(shannon_entropy).collect();
    let h_min = h.iter().copied().fold(f64::INFINITY, f64::min);
    let q_star = pi
        .vertices()
        .iter()
        .zip(&h)
        .filter(|(_, &x)| x <= h_min + tol::TIE)
        .map(|(v, _)| v.clone())
        .collect();
    (h_min, q_star)
}

/// The classical family `p_ε = q + εv` inside `Π`, measured against the set of
/// entropy-minimizing vertices.
pub fn sharpness_family(
    pi: &MarginalPolytope,
    q: &ProbabilityVector,
    v: &[f64],
    epsilons: &[f64],
) -> Result<SharpnessReport> {
    check_direction(pi.r(), v, epsilons)?;
    let (h_min, q_star) = classical_minimizers(pi);
    let mut gaps = Vec::with_capacity(epsilons.len());
    let mut distances = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let p = perturbed(pi, q, v, eps)?;
        gaps.push(shannon_entropy(&p) - h_min);
        distances.push(q_star.iter().map(|s| p.l1_distance(s)).fold(f64::INFINITY, f64::min));
    }
    let fitted_exponent = fit_exponent(&distances, &gaps)?;
    let (directional_derivative, derivative_divergent) = directional_derivative(q, v);
    Ok(SharpnessReport {
        epsilons: epsilons.to_vec(),
        gaps,
        distances,
        fitted_exponent,
        directional_derivative,
        derivative_divergent,
        exponent_class: ExponentClass::of(fitted_exponent),
    })
}

fn lifted_state(c: &BlockConvexSet, p: ProbabilityVector) -> BlockState {
    let d = c.decomposition();
    let states = (0..d.num_blocks()).map(|i| DensityMatrix::basis_state(d.dim(i), 0)).collect();
    BlockState::from_parts(d.clone(), p, states).expect("lift parts are consistent")
}

fn require_full(c: &BlockConvexSet) -> Result<()> {
    if !c.all_full() {
        return Err(Error::validation(
            "conditionals",
            "the block-diagonal lift needs every conditional set to be full",
        ));
    }
    Ok(())
}

/// Gap and distance of `ρ_ε = ⊕ p_ε(i)·|0⟩⟨0|` for a single `ε` (which may be 0).
pub fn quantum_lift_point(
    c: &BlockConvexSet,
    md: &MinimizerDescription,
    q: &ProbabilityVector,
    v: &[f64],
    eps: f64,
) -> Result<(f64, f64)> {
    require_full(c)?;
    let p = perturbed(c.marginal(), q, v, eps)?;
    let rho = lifted_state(c, p);
    let gap = entropy_of_blockstate(&rho) - md.s_min;
    let (dist, _) = distance_to_minimizers(c, &rho, md)?;
    Ok((gap, dist))
}

/// Lifts the classical family to `ρ_ε = ⊕ p_ε(i)σᵢ` with fixed pure `σᵢ` and
/// compares it with the classical one.
pub fn quantum_sharpness_family(
    c: &BlockConvexSet,
    md: &MinimizerDescription,
    q: &ProbabilityVector,
    v: &[f64],
    epsilons: &[f64],
) -> Result<QuantumSharpnessReport> {
    require_full(c)?;
    let classical = sharpness_family(c.marginal(), q, v, epsilons)?;
    let reference = lifted_state(c, q.clone());
    let mut gaps = Vec::with_capacity(epsilons.len());
    let mut distances = Vec::with_capacity(epsilons.len());
    let mut gap_residual = 0.0f64;
    let mut distance_residual = 0.0f64;
    let mut reference_distance_residual = 0.0f64;
    for (k, &eps) in epsilons.iter().enumerate() {
        let p = perturbed(c.marginal(), q, v, eps)?;
        let rho = lifted_state(c, p.clone());
        let gap = entropy_of_blockstate(&rho) - md.s_min;
        let (dist, _) = distance_to_minimizers(c, &rho, md)?;
        gap_residual = gap_residual.max((gap - classical.gaps[k]).abs());
        distance_residual = distance_residual.max((dist - classical.distances[k]).abs());
        let to_ref = blockwise_trace_distance(&rho, &reference)?;
        reference_distance_residual = reference_distance_residual.max((to_ref - p.l1_distance(q)).abs());
        gaps.push(gap);
        distances.push(dist);
    }
    let fitted_exponent = fit_exponent(&distances, &gaps)?;
    let quantum = SharpnessReport {
        epsilons: epsilons.to_vec(),
        gaps,
        distances,
        fitted_exponent,
        directional_derivative: classical.directional_derivative,
        derivative_divergent: classical.derivative_divergent,
        exponent_class: ExponentClass::of(fitted_exponent),
    };
    Ok(QuantumSharpnessReport {
        classical,
        quantum,
        gap_residual,
        distance_residual,
        reference_distance_residual,
    })
}
