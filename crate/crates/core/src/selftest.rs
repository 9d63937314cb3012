//! Invariant suite run by `blockent selftest`.
//!
//! Each check draws from its own seeded stream and returns a pass/fail line with
//! the worst observed slack.

use rayon::prelude::*;
use serde::Serialize;

use crate::block::{assemble, blockwise_bound_check, blockwise_trace_distance, decompose, entropy_of_blockstate, BlockDecomposition, BlockState};
use crate::constraint::{member_check, sample_member_with, BlockConvexSet};
use crate::entropy::{max_mass_bounds, purity, relative_entropy, trace_distance, von_neumann_entropy};
use crate::error::Result;
use crate::gibbs::gibbs_verify;
use crate::majorization::{block_spectrum, majorizes};
use crate::minimizer::{distance_to_minimizers, minimize_entropy};
use crate::rng::{self, streams};
use crate::spec_file::parse_spec_str;
use crate::stability::{quantum_sharpness_family, verify_stability};
use crate::state::{DensityMatrix, ProbabilityVector};

/// Shipped fixture specs, by name.
pub const FIXTURES: &[(&str, &str)] = &[
    ("classical_simplex2", include_str!("../fixtures/classical_simplex2.json")),
    ("classical_segment", include_str!("../fixtures/classical_segment.json")),
    ("gibbs_uniform_r2", include_str!("../fixtures/gibbs_uniform_r2.json")),
    ("gibbs_uniform_r3", include_str!("../fixtures/gibbs_uniform_r3.json")),
    ("hull_mixed", include_str!("../fixtures/hull_mixed.json")),
];

pub fn fixture(name: &str) -> Result<BlockConvexSet> {
    let (_, text) = FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| crate::Error::validation("fixture", format!("unknown fixture {name}")))?;
    parse_spec_str(text, name)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

fn worst<I: Iterator<Item = f64>>(it: I) -> f64 {
    it.fold(f64::NEG_INFINITY, f64::max)
}

fn random_block_state(d: &BlockDecomposition, rng: &mut rng::SampleRng) -> BlockState {
    let p = ProbabilityVector::new(rng::dirichlet_flat(rng, d.num_blocks())).expect("dirichlet");
    let states = d.dims().iter().map(|&k| rng::random_density(rng, k)).collect();
    BlockState::from_parts(d.clone(), p, states).expect("consistent parts")
}

fn core_math_checks(seed: u64, n: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let dims = [2usize, 3, 4, 8];

    let purity_slack = worst(dims.iter().flat_map(|&d| {
        (0..n as u64).map(move |k| {
            let rho = rng::random_density(&mut rng::rng_for(seed, streams::SELFTEST + k), d);
            -(von_neumann_entropy(&rho) + purity(&rho).ln())
        })
    }));
    out.push(CheckResult::new("entropy >= -log purity", purity_slack <= 1e-9, format!("worst deficit {purity_slack:.3e}")));

    let pinsker = worst(dims.iter().flat_map(|&d| {
        (0..n as u64).map(move |k| {
            let mut r = rng::rng_for(seed ^ 0x5eed, streams::SELFTEST + k);
            let a = rng::random_density(&mut r, d);
            let b = rng::random_full_support_density(&mut r, d);
            0.5 * trace_distance(&a, &b).unwrap().powi(2) - relative_entropy(&a, &b).unwrap()
        })
    }));
    out.push(CheckResult::new("Pinsker", pinsker <= 1e-9, format!("worst deficit {pinsker:.3e}")));

    let unitary = worst((0..n as u64).map(|k| {
        let mut r = rng::rng_for(seed ^ 0xabc, k);
        let rho = rng::random_density(&mut r, 4);
        let u = rng::random_unitary(&mut r, 4);
        (von_neumann_entropy(&rho.conjugate_by(&u)) - von_neumann_entropy(&rho)).abs()
    }));
    out.push(CheckResult::new("unitary invariance of entropy", unitary <= 1e-8, format!("max drift {unitary:.3e}")));

    let metric = worst((0..n as u64).map(|k| {
        let mut r = rng::rng_for(seed ^ 0x77, k);
        let (a, b, c) = (rng::random_density(&mut r, 3), rng::random_density(&mut r, 3), rng::random_density(&mut r, 3));
        let ab = trace_distance(&a, &b).unwrap();
        let asym = (ab - trace_distance(&b, &a).unwrap()).abs();
        let tri = ab - trace_distance(&a, &c).unwrap() - trace_distance(&c, &b).unwrap();
        asym.max(tri)
    }));
    out.push(CheckResult::new("trace distance is a metric", metric <= 1e-9, format!("worst excess {metric:.3e}")));

    let mass = worst((0..n as u64).map(|k| {
        let mut r = rng::rng_for(seed ^ 0x99, k);
        let len = 2 + (k as usize % 7);
        let p = ProbabilityVector::new(rng::dirichlet_flat(&mut r, len)).unwrap();
        let b = max_mass_bounds(&p);
        b.lower_exp.max(b.lower_refined) - p.max()
    }));
    out.push(CheckResult::new("max-mass lower bounds", mass <= 1e-12, format!("worst excess {mass:.3e}")));
    out
}

fn block_checks(seed: u64, n: usize) -> Vec<CheckResult> {
    let decomps = [vec![2, 2], vec![1, 3], vec![2, 3, 2]];
    let mut decomposition_err = 0.0f64;
    let mut additivity_err = 0.0f64;
    let mut bound_excess = f64::NEG_INFINITY;
    let mut roundtrip_err = 0.0f64;
    for dims in &decomps {
        let d = BlockDecomposition::new(dims.clone()).unwrap();
        for k in 0..n as u64 {
            let mut r = rng::rng_for(seed ^ 0xb10c, k);
            let a = random_block_state(&d, &mut r);
            let b = random_block_state(&d, &mut r);
            let (fa, fb) = (assemble(&a), assemble(&b));
            decomposition_err = decomposition_err.max((entropy_of_blockstate(&a) - von_neumann_entropy(&fa)).abs());
            additivity_err = additivity_err
                .max((blockwise_trace_distance(&a, &b).unwrap() - trace_distance(&fa, &fb).unwrap()).abs());
            let (lhs, rhs) = blockwise_bound_check(&a, &b).unwrap();
            bound_excess = bound_excess.max(lhs - rhs);
            let back = decompose(&fa, &d).unwrap();
            roundtrip_err = roundtrip_err.max(blockwise_trace_distance(&a, &back).unwrap());
        }
    }
    vec![
        CheckResult::new("entropy decomposition", decomposition_err <= 1e-8, format!("max error {decomposition_err:.3e}")),
        CheckResult::new("blockwise trace-norm additivity", additivity_err <= 1e-9, format!("max error {additivity_err:.3e}")),
        CheckResult::new("blockwise trace inequality", bound_excess <= 1e-9, format!("worst excess {bound_excess:.3e}")),
        CheckResult::new("decompose/assemble round trip", roundtrip_err <= 1e-8, format!("max error {roundtrip_err:.3e}")),
    ]
}

fn fixture_checks(name: &str, c: &BlockConvexSet, seed: u64, n: usize) -> Vec<CheckResult> {
    let md = minimize_entropy(c);
    let per_sample: Vec<(bool, bool, f64, f64, bool, bool)> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::rng_for(seed, streams::SELFTEST + k);
            let a = sample_member_with(c, &mut r);
            let b = sample_member_with(c, &mut r);
            let member = member_check(c, &a).unwrap_or(false);
            let mixed = decompose(&assemble(&a).mix(&assemble(&b), 0.25).unwrap(), c.decomposition())
                .ok()
                .map(|m| member_check(c, &m).unwrap_or(false))
                .unwrap_or(false);
            let gap = entropy_of_blockstate(&a) - md.s_min;
            let (_, sigma) = distance_to_minimizers(c, &a, &md).expect("member");
            let sigma_gap = (entropy_of_blockstate(&sigma) - md.s_min).abs();
            let sigma_member = member_check(c, &sigma).unwrap_or(false);
            let schur = majorizes(&block_spectrum(&sigma), &block_spectrum(&a), 1e-9);
            (member, mixed, gap, sigma_gap, sigma_member, schur)
        })
        .collect();
    let members = per_sample.iter().all(|s| s.0);
    let convex = per_sample.iter().all(|s| s.1);
    let min_gap = per_sample.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let sigma_gap = worst(per_sample.iter().map(|s| s.3));
    let sigma_members = per_sample.iter().all(|s| s.4);
    let schur_failures = per_sample.iter().filter(|s| !s.5).count();

    let zero_dist = {
        let mut r = rng::rng_for(seed, streams::SELFTEST);
        let sigma = crate::stability::sample_minimizer(c, &md, &mut r);
        distance_to_minimizers(c, &sigma, &md).map(|(d, _)| d).unwrap_or(f64::INFINITY)
    };

    let mut out = vec![
        CheckResult::new(format!("{name}: samples are members"), members, ""),
        CheckResult::new(format!("{name}: convexity of members"), convex, ""),
        CheckResult::new(format!("{name}: entropy >= S_min"), min_gap >= -1e-9, format!("min gap {min_gap:.3e}")),
        CheckResult::new(
            format!("{name}: nearest minimizer has S_min and is a member"),
            sigma_gap <= 1e-8 && sigma_members,
            format!("max |S(σ) − S_min| {sigma_gap:.3e}"),
        ),
        CheckResult::new(format!("{name}: dist(minimizer, M) = 0"), zero_dist <= 1e-9, format!("{zero_dist:.3e}")),
        CheckResult::new(
            format!("{name}: minimizer spectrum majorizes member spectrum"),
            schur_failures == 0,
            format!("{schur_failures} counterexamples"),
        ),
    ];
    match verify_stability(c, n, seed) {
        Ok(rep) => out.push(CheckResult::new(
            format!("{name}: stability gap >= C·dist²"),
            rep.violations == 0,
            rep.summary_line(),
        )),
        Err(e) => out.push(CheckResult::new(format!("{name}: stability gap >= C·dist²"), false, e.to_string())),
    }
    out
}

/// Runs every invariant check with `n` samples per check.
pub fn run_all(seed: u64, n: usize) -> Vec<CheckResult> {
    let mut out = core_math_checks(seed, n);
    out.extend(block_checks(seed, n));
    for (name, _) in FIXTURES {
        let c = fixture(name).expect("shipped fixtures parse");
        out.extend(fixture_checks(name, &c, seed, n));
    }
    for r in [2usize, 3] {
        let d = BlockDecomposition::new(vec![2; r]).unwrap();
        let check = format!("uniform fixed populations r={r}: gap >= dist²/(2r)");
        match gibbs_verify(&d, &ProbabilityVector::uniform(r), n, seed) {
            Ok(rep) => out.push(CheckResult::new(
                check,
                rep.violations == 0 && rep.sqrt_bound_violations == Some(0),
                rep.summary_line(),
            )),
            Err(e) => out.push(CheckResult::new(check, false, e.to_string())),
        }
    }
    let seg = fixture("classical_segment").expect("fixture");
    let lifted = BlockConvexSet::new(
        BlockDecomposition::new(vec![2, 2]).unwrap(),
        seg.marginal().clone(),
        vec![crate::constraint::ConditionalSet::Full; 2],
    )
    .unwrap();
    let md = minimize_entropy(&lifted);
    let q = ProbabilityVector::new(vec![0.2, 0.8]).unwrap();
    let eps = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    match quantum_sharpness_family(&lifted, &md, &q, &[1.0, -1.0], &eps) {
        Ok(rep) => {
            let identities = rep.gap_residual <= 1e-9 && rep.distance_residual <= 1e-9 && rep.reference_distance_residual <= 1e-9;
            out.push(CheckResult::new("block lift reproduces classical family", identities, format!("residuals {:.1e}/{:.1e}/{:.1e}", rep.gap_residual, rep.distance_residual, rep.reference_distance_residual)));
            let e = rep.classical.fitted_exponent;
            out.push(CheckResult::new("nonzero-derivative family is linear", (0.9..=1.1).contains(&e), format!("exponent {e:.4}")));
        }
        Err(e) => out.push(CheckResult::new("block lift reproduces classical family", false, e.to_string())),
    }
    let pure = DensityMatrix::basis_state(2, 0);
    out.push(CheckResult::new(
        "relative entropy off support is infinite",
        relative_entropy(&DensityMatrix::basis_state(2, 1), &pure).map(|d| d.is_infinite()).unwrap_or(false),
        "",
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        for (name, _) in FIXTURES {
            fixture(name).unwrap();
        }
        assert!(fixture("nope").is_err());
    }

    #[test]
    fn small_suite_passes() {
        let results = run_all(1, 60);
        let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
