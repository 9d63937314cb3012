mod common;

use approx::assert_abs_diff_eq;

use blockent::block::{blockwise_bound_check, blockwise_trace_distance};
use blockent::entropy::{relative_entropy, shannon_entropy, trace_distance, von_neumann_entropy};
use blockent::linalg::{c64, CMat};
use blockent::minimizer::{distance_to_minimizers, nearest_pure_block};
use blockent::rng::{self, rng_for};
use blockent::stability::{estimate_c1, C1Estimate};
use blockent::{minimize_entropy, BlockDecomposition, BlockState, DensityMatrix, MarginalPolytope, ProbabilityVector};

use common::*;

fn pv(v: &[f64]) -> ProbabilityVector {
    ProbabilityVector::new(v.to_vec()).unwrap()
}

#[test]
fn scalar_kl_for_commuting_states() {
    let a = DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap();
    let b = DensityMatrix::maximally_mixed(2);
    let kl = 0.7 * (0.7f64 / 0.5).ln() + 0.3 * (0.3f64 / 0.5).ln();
    assert_abs_diff_eq!(relative_entropy(&a, &b).unwrap(), kl, epsilon = 1e-12);
}

#[test]
fn trace_distance_of_diagonal_states_is_l1_of_spectra() {
    let a = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
    let b = DensityMatrix::maximally_mixed(2);
    assert_abs_diff_eq!(trace_distance(&a, &b).unwrap(), 0.2, epsilon = 1e-12);
}

#[test]
fn entropy_is_invariant_under_random_rotation() {
    let spectrum = [0.5, 0.3, 0.2];
    let reference = -spectrum.iter().map(|&x: &f64| x * x.ln()).sum::<f64>();
    let rho = DensityMatrix::from_diagonal(&spectrum).unwrap();
    for k in 0..20 {
        let u = rng::random_unitary(&mut rng_for(5, k), 3);
        assert_abs_diff_eq!(von_neumann_entropy(&rho.conjugate_by(&u)), reference, epsilon = 1e-12);
    }
}

#[test]
fn nearest_pure_state_beats_a_one_degree_grid() {
    let grid = bloch_grid(1.0);
    for k in 0..40 {
        let mut r = rng_for(11, k);
        let rho = rng::random_density(&mut r, 2);
        let (p, q) = (0.3 + 0.7 * (k as f64 / 40.0), 1.0 - 0.5 * (k as f64 / 40.0));
        let (_, lib) = nearest_pure_block(&rho, p, q).unwrap();
        let weighted = rho.matrix() * c64(p, 0.0);
        let brute = grid
            .iter()
            .map(|s| trace_norm_of_difference(&weighted, s, q))
            .fold(f64::INFINITY, f64::min);
        assert!(lib <= brute + 1e-12, "lib {lib} above grid {brute}");
        assert!(brute - lib <= 1e-3, "lib {lib} grid {brute}");
    }
}

#[test]
fn documented_nearest_pure_examples_match_grid() {
    let grid = bloch_grid(1.0);
    for (diag, expected) in [([0.9, 0.1], 0.2), ([0.5, 0.5], 1.0)] {
        let rho = DensityMatrix::from_diagonal(&diag).unwrap();
        let brute = grid
            .iter()
            .map(|s| trace_norm_of_difference(rho.matrix(), s, 1.0))
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(brute, expected, epsilon = 1e-9);
        assert_abs_diff_eq!(nearest_pure_block(&rho, 1.0, 1.0).unwrap().1, expected, epsilon = 1e-12);
    }
}

fn segment_grid_infimum(a: &[f64], b: &[f64], steps: usize) -> f64 {
    let ha = shannon(a);
    let hb = shannon(b);
    let h_min = ha.min(hb);
    let mut ends = Vec::new();
    if ha <= h_min + 1e-9 {
        ends.push(a.to_vec());
    }
    if hb <= h_min + 1e-9 {
        ends.push(b.to_vec());
    }
    (1..steps)
        .map(|k| {
            let t = k as f64 / steps as f64;
            let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
            let dist = ends
                .iter()
                .map(|e| e.iter().zip(&p).map(|(x, y)| (x - y).abs()).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            (shannon(&p) - h_min) / (dist * dist)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn c1_on_two_simplex_matches_grid() {
    let oracle = segment_grid_infimum(&[1.0, 0.0], &[0.0, 1.0], 20_000);
    assert_abs_diff_eq!(oracle, 2f64.ln(), epsilon = 1e-6);
    let pi = MarginalPolytope::simplex(2);
    let q_star = vec![pv(&[1.0, 0.0]), pv(&[0.0, 1.0])];
    match estimate_c1(&pi, &q_star, 100_000, 3) {
        C1Estimate::Value(c) => {
            assert!(c >= oracle - 1e-9);
            assert!(c - oracle < 1e-2, "estimate {c} vs {oracle}");
        }
        C1Estimate::NotApplicable => panic!("expected a value"),
    }
}

#[test]
fn c1_on_segment_matches_grid() {
    let (a, b) = ([0.2, 0.8], [0.8, 0.2]);
    let oracle = segment_grid_infimum(&a, &b, 20_000);
    assert!(oracle > 0.0);
    let pi = MarginalPolytope::new(vec![pv(&a), pv(&b)]).unwrap();
    let q_star = vec![pv(&a), pv(&b)];
    match estimate_c1(&pi, &q_star, 100_000, 3) {
        C1Estimate::Value(c) => {
            assert!(c >= oracle - 1e-9);
            assert!(c - oracle < 1e-2, "estimate {c} vs {oracle}");
        }
        C1Estimate::NotApplicable => panic!("expected a value"),
    }
}

#[test]
fn classical_distance_is_l1_to_nearest_vertex() {
    let c = blockent::spec_file::parse_spec(fixture_path("classical_simplex2")).unwrap();
    let md = minimize_entropy(&c);
    for k in 0..50 {
        let t = k as f64 / 50.0;
        let bs = BlockState::from_parts(
            c.decomposition().clone(),
            pv(&[t, 1.0 - t]),
            vec![DensityMatrix::basis_state(1, 0); 2],
        )
        .unwrap();
        let (d, _) = distance_to_minimizers(&c, &bs, &md).unwrap();
        assert_abs_diff_eq!(d, 2.0 * t.min(1.0 - t), epsilon = 1e-12);
        assert_abs_diff_eq!(entropy_of(&[t, 1.0 - t]), shannon(&[t, 1.0 - t]), epsilon = 1e-12);
    }
}

fn entropy_of(p: &[f64]) -> f64 {
    shannon_entropy(&pv(p))
}

#[test]
fn blockwise_quantities_match_per_block_evaluation() {
    let d = BlockDecomposition::new(vec![2, 2]).unwrap();
    for k in 0..30 {
        let mut r = rng_for(17, k);
        let mk = |r: &mut _| {
            let p = pv(&rng::dirichlet_flat(r, 2));
            let s = vec![rng::random_density(r, 2), rng::random_density(r, 2)];
            BlockState::from_parts(d.clone(), p, s).unwrap()
        };
        let (a, b) = (mk(&mut r), mk(&mut r));
        let per_block: Vec<f64> = (0..2)
            .map(|i| small_trace_norm(&(a.weighted_block(i) - b.weighted_block(i))))
            .collect();
        assert_abs_diff_eq!(blockwise_trace_distance(&a, &b).unwrap(), per_block.iter().sum::<f64>(), epsilon = 1e-12);

        let marginal = a.weights().l1_distance(b.weights());
        let conditional: f64 = (0..2)
            .map(|i| {
                let diff: CMat = a.conditional(i).unwrap().matrix() - b.conditional(i).unwrap().matrix();
                a.weights()[i] * small_trace_norm(&diff).powi(2)
            })
            .sum();
        let (lhs, rhs) = blockwise_bound_check(&a, &b).unwrap();
        assert!(lhs <= rhs + 1e-12);
        assert_abs_diff_eq!(lhs, per_block.iter().sum::<f64>().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(rhs, 2.0 * marginal * marginal + 2.0 * conditional, epsilon = 1e-12);
    }
}

#[test]
fn hull_fixture_minimum_matches_grid_oracle() {
    let raw = raw_fixture("hull_mixed");
    let om = oracle_minimizers(&raw, 1e-3, 2.0);
    let md = minimize_entropy(&raw.to_constraint_set().unwrap());
    assert_abs_diff_eq!(md.s_min, om.s_min, epsilon = 1e-12);
    assert_eq!(om.marginals.len(), 1);
    for (lib, oracle) in md.minimizing_marginals[0].as_slice().iter().zip(&om.marginals[0]) {
        assert_abs_diff_eq!(*lib, *oracle, epsilon = 1e-12);
    }
}
