mod common;

use divopt::dispersion::{exact_dispersion, furthest_insertion, gadget_from_graph, FiniteMetric};
use divopt::engine::Restriction;
use divopt::field::FieldConfig;
use divopt::matching::{diverse_matchings, is_matching, maximum_matching};
use divopt::matroid::{constrained_basis, diverse_min_weight_bases, min_weight_basis, GraphicMatroid, Mode, UniformMatroid};
use divopt::oracle::{all_bases, all_matchings, all_spanning_trees, c_short_paths};
use divopt::paths::{diverse_short_paths, shortest_distance};
use divopt::rational::{int, ratio};
use divopt::trees::{diverse_spanning_trees, is_spanning_tree};
use divopt::{diversity_sum, hamming_distance, occurrence_weights, EdgeSubset, Error};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{connected_graph, digraph, simple_graph, small_int, unit};

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() }
}

fn pairwise_consistent(solutions: &[EdgeSubset], pairwise: &[Vec<usize>], diversity: usize) -> bool {
    let k = solutions.len();
    let mut total = 0;
    for a in 0..k {
        if pairwise[a][a] != 0 {
            return false;
        }
        for b in 0..k {
            if pairwise[a][b] != pairwise[b][a] || pairwise[a][b] != hamming_distance(&solutions[a], &solutions[b]).unwrap() {
                return false;
            }
            total += pairwise[a][b];
        }
    }
    total == 2 * diversity && diversity_sum(solutions).unwrap() == diversity
}

fn all_distinct(solutions: &[EdgeSubset]) -> bool {
    (0..solutions.len()).all(|a| (a + 1..solutions.len()).all(|b| !solutions[a].same_edges(&solutions[b])))
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn furthest_insertion_returns_distinct_points(seed in any::<u64>(), n in 2usize..9, k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = simple_graph(&mut rng, n, 0.5);
        let metric = gadget_from_graph(&g).unwrap();
        let k = k.min(n);
        let pts = furthest_insertion(&metric, k, 0).unwrap();
        let mut sorted = pts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), k);
        let (_, opt) = exact_dispersion(&metric, k).unwrap();
        prop_assert!(int(2) * metric.subset_value(&pts) >= opt);
    }

    #[test]
    fn line_metrics_are_metrics(xs in proptest::collection::vec(-50i64..50, 1..8)) {
        let dist = xs.iter().map(|a| xs.iter().map(|b| int((a - b).abs())).collect()).collect();
        let metric = FiniteMetric::new(dist, true).unwrap();
        prop_assert!(metric.triangle_violation().is_none());
    }

    #[test]
    fn diverse_trees_are_distinct_spanning_trees(seed in any::<u64>(), n in 2usize..7, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = connected_graph(&mut rng, n, 0.5, unit);
        let count = all_spanning_trees(&g).unwrap().len();
        match diverse_spanning_trees(&g, k) {
            Ok(r) => {
                prop_assert!(count >= k);
                prop_assert!(r.solutions.iter().all(|t| is_spanning_tree(&g, t.ids())));
                prop_assert!(all_distinct(&r.solutions));
                prop_assert!(pairwise_consistent(&r.solutions, &r.pairwise, r.diversity));
            }
            Err(Error::FewerThanK { .. }) => prop_assert!(count < k),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn diverse_paths_stay_within_budget(seed in any::<u64>(), n in 2usize..7, k in 1usize..4, c in 2i64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = digraph(&mut rng, n, 0.5);
        let t = n - 1;
        let c = ratio(c, 2);
        prop_assume!(shortest_distance(&g, 0, t).is_some());
        let budget = &c * shortest_distance(&g, 0, t).unwrap();
        let count = c_short_paths(&g, 0, t, &c).unwrap().len();
        match diverse_short_paths(&g, 0, t, k, &c) {
            Ok(r) => {
                prop_assert!(r.solutions.iter().all(|p| g.total_weight(p.ids()) <= budget));
                prop_assert!(all_distinct(&r.solutions));
                prop_assert!(pairwise_consistent(&r.solutions, &r.pairwise, r.diversity));
            }
            Err(Error::FewerThanK { .. }) => prop_assert!(count < k),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn blossom_matches_enumeration(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = simple_graph(&mut rng, n, 0.4);
        let m = maximum_matching(&g).unwrap();
        prop_assert!(is_matching(&g, m.ids()));
        let best = all_matchings(&g).unwrap().iter().map(|x| x.len()).max().unwrap_or(0);
        prop_assert_eq!(m.len(), best);
    }

    #[test]
    fn diverse_matchings_are_large_enough(seed in any::<u64>(), n in 2usize..7, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = simple_graph(&mut rng, n, 0.6);
        prop_assume!(g.edge_count() > 0);
        let delta = maximum_matching(&g).unwrap().len();
        let cfg = FieldConfig::with_seed(seed, FieldConfig::amplified_repeats(3.0, k, n));
        match diverse_matchings(&g, k, &int(2), &cfg) {
            Ok(r) => {
                prop_assert!(r.solutions.iter().all(|x| is_matching(&g, x.ids()) && 2 * x.len() >= delta));
                prop_assert!(all_distinct(&r.solutions));
                prop_assert!(pairwise_consistent(&r.solutions, &r.pairwise, r.diversity));
            }
            Err(Error::FewerThanK { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn greedy_basis_is_lightest(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = connected_graph(&mut rng, n, 0.5, small_int);
        let w = g.weights().to_vec();
        let matroid = GraphicMatroid::new(g.clone()).unwrap();
        let b = min_weight_basis(&matroid, &w).unwrap();
        let best = all_bases(&matroid).unwrap().iter().map(|x| g.total_weight(x)).min().unwrap();
        prop_assert_eq!(g.total_weight(b.ids()), best);
    }

    #[test]
    fn constrained_basis_respects_restriction(seed in any::<u64>(), n in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = connected_graph(&mut rng, n, 0.6, small_int);
        let w = g.weights().to_vec();
        let m = g.edge_count();
        let matroid = GraphicMatroid::new(g.clone()).unwrap();
        let prior = min_weight_basis(&matroid, &w).unwrap();
        let b0 = prior.ids().to_vec();
        let l = occurrence_weights(&[prior], m).unwrap();
        let include = vec![b0[0]];
        let exclude: Vec<usize> = (0..m).filter(|e| !b0.contains(e)).take(1).collect();
        let restriction = Restriction::new(include.clone(), exclude.clone());
        let budget = int(2) * g.total_weight(&b0);
        for mode in [Mode::Lagrangian2, Mode::PtasEps(ratio(1, 2)), Mode::PseudoExact(ratio(1, 10))] {
            if let Some(b) = constrained_basis(&matroid, &w, &l, &budget, &mode, &restriction).unwrap() {
                prop_assert!(include.iter().all(|&e| b.contains(e)));
                prop_assert!(exclude.iter().all(|&e| !b.contains(e)));
                prop_assert!(is_spanning_tree(&g, b.ids()));
                prop_assert!(g.total_weight(b.ids()) <= mode.budget_factor() * &budget);
            }
        }
    }

    #[test]
    fn uniform_bases_are_diverse(n in 2usize..8, r in 1usize..4, k in 1usize..4) {
        let r = r.min(n);
        let matroid = UniformMatroid::new(n, r).unwrap();
        let w = vec![int(1); n];
        match diverse_min_weight_bases(&matroid, &w, k, &int(1), &Mode::Lagrangian2) {
            Ok(res) => {
                prop_assert!(res.solutions.iter().all(|b| b.len() == r));
                prop_assert!(all_distinct(&res.solutions));
            }
            Err(Error::FewerThanK { .. }) => prop_assert!(divopt::dispersion::binomial(n, r) < k as u128),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
