use std::f64::consts::PI;

use proptest::prelude::*;

use oscicut::graph::{
    couplings_from_weights, cut_weight, ternary_energy, xy_energy, PartitionAssignment, SpinConfiguration,
    WeightedGraph,
};
use oscicut::oracle::brute_force_cut;
use oscicut::rounding::{best_cut, bin_spins, BoundarySet};
use oscicut::solve::polish;

fn graph(n: usize) -> impl Strategy<Value = WeightedGraph> {
    prop::collection::vec(-3.0f64..3.0, n * (n - 1) / 2).prop_map(move |upper| {
        let mut g = WeightedGraph::empty(n).unwrap();
        let mut it = upper.into_iter();
        for i in 0..n {
            for j in (i + 1)..n {
                g.set_weight(i, j, it.next().unwrap()).unwrap();
            }
        }
        g
    })
}

fn graph_and_labels(k: u8) -> impl Strategy<Value = (WeightedGraph, Vec<u8>)> {
    (2usize..=9).prop_flat_map(move |n| (graph(n), prop::collection::vec(0..k, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ternary_energy_tracks_cut((g, labels) in graph_and_labels(3)) {
        let j = couplings_from_weights(&g);
        let a = PartitionAssignment::new(3, labels.clone()).unwrap();
        let n = g.n();
        let (mut c, mut cross) = (0.0, 0.0);
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    c += j.get(p, q);
                    if labels[p] != labels[q] {
                        cross += j.get(p, q);
                    }
                }
            }
        }
        let h = ternary_energy(&j, &a).unwrap();
        prop_assert!((h + c - 1.5 * cross).abs() < 1e-9);
        prop_assert!((h - (2.0 * g.total_weight() - 3.0 * cut_weight(&g, &a).unwrap())).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cut_ignores_label_names((g, labels) in graph_and_labels(4), perm in Just(vec![0u8, 1, 2, 3]).prop_shuffle()) {
        let a = PartitionAssignment::new(4, labels).unwrap();
        let b = a.relabeled(&perm).unwrap();
        prop_assert!((cut_weight(&g, &a).unwrap() - cut_weight(&g, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rounding_commutes_with_rotation(
        (g, _) in graph_and_labels(3),
        k in 2usize..=4,
        delta in -PI..PI,
        seed in any::<u64>(),
    ) {
        let n = g.n();
        let phases: Vec<f64> = (0..n).map(|i| ((seed.wrapping_mul(i as u64 + 1) % 6283) as f64) / 1000.0).collect();
        let s = SpinConfiguration::new(phases).unwrap();
        let base = BoundarySet::random(k, 16, seed).unwrap();
        let shifted = BoundarySet::from_angles(k, base.angles().iter().map(|a| a + delta).collect()).unwrap();
        let r0 = best_cut(&g, &s, &base).unwrap();
        let r1 = best_cut(&g, &s.rotated(delta), &shifted).unwrap();
        for (a, b) in r0.per_boundary_weights.iter().zip(&r1.per_boundary_weights) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let j = couplings_from_weights(&g);
        prop_assert!((xy_energy(&j, &s).unwrap() - xy_energy(&j, &s.rotated(delta)).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn binning_stays_in_range(phases in prop::collection::vec(-10.0f64..10.0, 1..12), k in 2usize..=4, phi in 0.0f64..PI) {
        let s = SpinConfiguration::new(phases).unwrap();
        let a = bin_spins(&s, k, phi).unwrap();
        prop_assert!(a.labels().iter().all(|&l| (l as usize) < k));
    }

    #[test]
    fn oracle_bounds_every_cut((g, labels) in graph_and_labels(3)) {
        let r = brute_force_cut(&g, 3).unwrap();
        let a = PartitionAssignment::new(3, labels).unwrap();
        let w = cut_weight(&g, &a).unwrap();
        if a.distinct_labels() >= 2 {
            prop_assert!(w <= r.max_weight + 1e-9 && w >= r.min_weight - 1e-9);
        }
        prop_assert!((cut_weight(&g, &r.argmax).unwrap() - r.max_weight).abs() < 1e-9);
        let (p, _) = polish(&g, &r.argmax);
        prop_assert!((p - r.max_weight).abs() < 1e-9);
    }
}
