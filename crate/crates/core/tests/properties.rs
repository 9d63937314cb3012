use proptest::prelude::*;

use blockent::block::{assemble, blockwise_trace_distance, decompose, entropy_of_blockstate};
use blockent::constraint::{member_check, sample_member};
use blockent::entropy::{purity, shannon_entropy, trace_distance, von_neumann_entropy};
use blockent::hull::hull_fit;
use blockent::majorization::majorizes;
use blockent::minimizer::{distance_to_minimizers, minimize_entropy};
use blockent::rng::{self, rng_for};
use blockent::spec_file::{parse_spec_str, serialize_spec};
use blockent::{BlockConvexSet, BlockDecomposition, BlockState, ConditionalSet, MarginalPolytope, ProbabilityVector};

fn block_state(dims: &[usize], seed: u64) -> BlockState {
    let d = BlockDecomposition::new(dims.to_vec()).unwrap();
    let mut r = rng_for(seed, 0);
    let p = ProbabilityVector::new(rng::dirichlet_flat(&mut r, dims.len())).unwrap();
    let states = dims.iter().map(|&n| rng::random_density(&mut r, n)).collect();
    BlockState::from_parts(d, p, states).unwrap()
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=3)
}

fn constraint_set(dims: &[usize], n_vertices: usize, hull_block: bool, seed: u64) -> BlockConvexSet {
    let d = BlockDecomposition::new(dims.to_vec()).unwrap();
    let mut r = rng_for(seed, 1);
    let verts = (0..n_vertices)
        .map(|_| ProbabilityVector::new(rng::dirichlet_flat(&mut r, dims.len())).unwrap())
        .collect();
    let conditionals = dims
        .iter()
        .enumerate()
        .map(|(i, &n)| match (i, hull_block) {
            (0, true) => ConditionalSet::Hull(vec![rng::random_pure_state(&mut r, n), rng::random_density(&mut r, n)]),
            (1, _) => ConditionalSet::Singleton(rng::random_density(&mut r, n)),
            _ => ConditionalSet::Full,
        })
        .collect();
    BlockConvexSet::new(d, MarginalPolytope::new(verts).unwrap(), conditionals).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_lies_between_zero_and_log_dim(dim in 1usize..=6, seed in any::<u64>()) {
        let rho = rng::random_density(&mut rng_for(seed, 0), dim);
        let s = von_neumann_entropy(&rho);
        prop_assert!(s >= 0.0 && s <= (dim as f64).ln() + 1e-9);
        prop_assert!(s >= -purity(&rho).ln() - 1e-9);
    }

    #[test]
    fn trace_distance_is_bounded(dim in 1usize..=5, seed in any::<u64>()) {
        let mut r = rng_for(seed, 0);
        let (a, b) = (rng::random_density(&mut r, dim), rng::random_density(&mut r, dim));
        let t = trace_distance(&a, &b).unwrap();
        prop_assert!((0.0..=2.0 + 1e-9).contains(&t));
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-9);
    }

    #[test]
    fn decomposition_identity_and_round_trip(dims in dims_strategy(), seed in any::<u64>()) {
        let bs = block_state(&dims, seed);
        let full = assemble(&bs);
        prop_assert!((entropy_of_blockstate(&bs) - von_neumann_entropy(&full)).abs() <= 1e-8);
        let back = decompose(&full, bs.decomposition()).unwrap();
        prop_assert!(blockwise_trace_distance(&bs, &back).unwrap() <= 1e-8);
        let h = shannon_entropy(bs.weights());
        prop_assert!(entropy_of_blockstate(&bs) >= h - 1e-12);
    }

    #[test]
    fn blockwise_distance_matches_full_matrix(dims in dims_strategy(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (block_state(&dims, s1), block_state(&dims, s2));
        let full = trace_distance(&assemble(&a), &assemble(&b)).unwrap();
        prop_assert!((blockwise_trace_distance(&a, &b).unwrap() - full).abs() <= 1e-9);
    }

    #[test]
    fn majorization_is_reflexive_and_uniform_is_minimal(len in 1usize..=8, seed in any::<u64>()) {
        let p = rng::dirichlet_flat(&mut rng_for(seed, 0), len);
        let u = vec![1.0 / len as f64; len];
        prop_assert!(majorizes(&p, &p, 1e-12));
        prop_assert!(majorizes(&p, &u, 1e-12));
    }

    #[test]
    fn hull_fit_recovers_convex_combinations(k in 1usize..=5, dim in 1usize..=5, seed in any::<u64>()) {
        let mut r = rng_for(seed, 0);
        let points: Vec<Vec<f64>> = (0..k).map(|_| rng::dirichlet_flat(&mut r, dim)).collect();
        let w = rng::dirichlet_flat(&mut r, k);
        let target: Vec<f64> = (0..dim).map(|j| points.iter().zip(&w).map(|(p, wi)| p[j] * wi).sum()).collect();
        prop_assert!(hull_fit(&points, &target).residual <= 1e-9);
    }

    #[test]
    fn members_sit_above_the_minimum(dims in prop::collection::vec(1usize..=2, 2..=3), n_vertices in 1usize..=4, hull in any::<bool>(), seed in any::<u64>()) {
        let c = constraint_set(&dims, n_vertices, hull, seed);
        let md = minimize_entropy(&c);
        for k in 0..4 {
            let bs = sample_member(&c, seed.wrapping_add(k));
            prop_assert!(member_check(&c, &bs).unwrap());
            prop_assert!(entropy_of_blockstate(&bs) >= md.s_min - 1e-9);
            let (dist, sigma) = distance_to_minimizers(&c, &bs, &md).unwrap();
            prop_assert!(dist >= 0.0);
            prop_assert!(member_check(&c, &sigma).unwrap());
            prop_assert!((entropy_of_blockstate(&sigma) - md.s_min).abs() <= 1e-8);
        }
    }

    #[test]
    fn spec_serialization_round_trips(dims in prop::collection::vec(1usize..=3, 2..=3), n_vertices in 1usize..=4, hull in any::<bool>(), seed in any::<u64>()) {
        let c = constraint_set(&dims, n_vertices, hull, seed);
        let text = serialize_spec(&c);
        let back = parse_spec_str(&text, "round-trip").unwrap();
        prop_assert_eq!(serialize_spec(&back), text);
        prop_assert_eq!(back.decomposition().dims(), c.decomposition().dims());
        prop_assert_eq!(back.marginal().vertices().len(), c.marginal().vertices().len());
    }
}
