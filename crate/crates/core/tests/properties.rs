mod common;

use common::{generator, train_n};
use greenstream::counters::Counters;
use greenstream::eval::rank_values;
use greenstream::generators::{
    make_generator, GeneratorConfig, GeneratorKind, GeneratorParams, HyperplaneParams, LedParams,
};
use greenstream::observer::{
    best_splits, gain_range, hoeffding_bound, information_gain, AttributeObserver, NominalObserver,
};
use greenstream::tree::should_split;
use greenstream::{GahtConfig, HoeffdingTree, StreamSource, TreeConfig, Value};
use proptest::prelude::*;

fn oracle_entropy(d: &[f64]) -> f64 {
    let total: f64 = d.iter().sum();
    d.iter()
        .filter(|w| **w > 0.0)
        .map(|w| -(w / total) * (w / total).log2())
        .sum()
}

/// Branch tables with `classes` columns, at least one positive cell.
fn branch_table(max_branches: usize, classes: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0u32..50, classes), 1..=max_branches)
        .prop_filter("some mass", |t| t.iter().flatten().any(|w| *w > 0))
        .prop_map(|t| t.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn gain_stays_within_range(table in (2usize..6).prop_flat_map(|c| branch_table(6, c))) {
        let g = information_gain(&table);
        prop_assert!(g >= 0.0);
        prop_assert!(g <= gain_range(table[0].len()) + 1e-12);
    }

    #[test]
    fn nominal_gain_matches_oracle(table in branch_table(5, 3)) {
        let values = table.len();
        let mut obs = NominalObserver::new(values, 3);
        let mut leaf = vec![0.0; 3];
        for (v, row) in table.iter().enumerate() {
            for (c, w) in row.iter().enumerate() {
                if *w > 0.0 {
                    obs.observe(v as u32, c as u32, *w);
                    leaf[c] += w;
                }
            }
        }
        let total: f64 = leaf.iter().sum();
        let expected = oracle_entropy(&leaf)
            - table.iter().map(|r| r.iter().sum::<f64>() / total * oracle_entropy(r)).sum::<f64>();
        let ranked = best_splits(&[AttributeObserver::Nominal(obs)], &[false], &leaf, &mut Counters::new()).unwrap();
        let merit = ranked.iter().find(|s| s.attribute == Some(0)).unwrap().merit;
        prop_assert!((merit - expected.max(0.0)).abs() < 1e-9, "{} vs {}", merit, expected);
    }

    #[test]
    fn nominal_observer_is_additive(v in 0u32..4, c in 0u32..3, w1 in 0.1f64..10.0, w2 in 0.1f64..10.0) {
        let mut split = NominalObserver::new(4, 3);
        split.observe(v, c, w1);
        split.observe(v, c, w2);
        let mut merged = NominalObserver::new(4, 3);
        merged.observe(v, c, w1 + w2);
        prop_assert!((split.count(v as usize, c as usize) - merged.count(v as usize, c as usize)).abs() < 1e-12);
        prop_assert!((split.total_weight() - (w1 + w2)).abs() < 1e-12);
    }

    #[test]
    fn hoeffding_bound_is_monotone(r in 0.1f64..4.0, delta in 1e-9f64..0.5, n in 1.0f64..1e6, k in 1.01f64..10.0) {
        let e = hoeffding_bound(r, delta, n);
        prop_assert!(hoeffding_bound(r, delta, n * k) < e);
        prop_assert!(hoeffding_bound(r * k, delta, n) > e);
        prop_assert!(hoeffding_bound(r, delta / k, n) > e);
    }

    #[test]
    fn clear_winner_always_splits(best in 0.0f64..2.0, gap in 1e-6f64..1.0, eps in 0.0f64..1.0, tau in 0.0f64..0.2) {
        let runner_up = best;
        let best = best + eps + gap;
        prop_assert!(should_split(best, runner_up, eps, tau));
    }

    #[test]
    fn ranks_sum_to_triangular(values in prop::collection::vec(0u8..5, 1..12), higher in any::<bool>()) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        let ranks = rank_values(&values, higher);
        let n = values.len() as f64;
        prop_assert!((ranks.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
        for i in 0..values.len() {
            for j in 0..values.len() {
                if values[i] == values[j] {
                    prop_assert_eq!(ranks[i], ranks[j]);
                }
            }
        }
    }

    #[test]
    fn out_of_range_noise_is_rejected(noise in prop_oneof![-10.0f64..-1e-9, 1.0001f64..10.0]) {
        let led = GeneratorConfig { seed: 1, params: GeneratorParams::Led(LedParams { noise, ..LedParams::default() }) };
        prop_assert!(make_generator(&led).is_err());
        let hyper = GeneratorConfig {
            seed: 1,
            params: GeneratorParams::Hyperplane(HyperplaneParams { noise, ..HyperplaneParams::default() }),
        };
        prop_assert!(make_generator(&hyper).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn no_evaluation_before_grace_period(nmin in 1u64..400, kind_index in 0usize..6, seed in 0u64..1000) {
        let kind = GeneratorKind::ALL[kind_index];
        let mut g = generator(kind, seed);
        let config = TreeConfig { nmin, ..TreeConfig::default() };
        let mut tree = HoeffdingTree::hoeffding(g.schema().clone(), config).unwrap();
        train_n(&mut tree, &mut g, nmin as usize - 1);
        prop_assert_eq!(tree.counters().split_evaluations, 0);
        train_n(&mut tree, &mut g, 1);
        prop_assert_eq!(tree.counters().split_evaluations, 1);
    }

    #[test]
    fn same_seed_same_run(kind_index in 0usize..6, seed in any::<u64>()) {
        let kind = GeneratorKind::ALL[kind_index];
        let run = || {
            let mut g = generator(kind, seed);
            let mut tree = HoeffdingTree::gaht(g.schema().clone(), GahtConfig::default()).unwrap();
            let r = greenstream::run_prequential(&mut tree, &mut g, 5_000, 1_000).unwrap();
            (r.summary.cumulative_accuracy, tree.counters(), tree.node_count(), g.next_example().unwrap())
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn predictions_are_distributions(kind_index in 0usize..6, seed in 0u64..100) {
        let kind = GeneratorKind::ALL[kind_index];
        let mut g = generator(kind, seed);
        let mut tree = HoeffdingTree::efdt(g.schema().clone(), TreeConfig::default()).unwrap();
        train_n(&mut tree, &mut g, 2_000);
        let e = g.next_example().unwrap();
        let votes = tree.predict(&e.instance).unwrap();
        prop_assert_eq!(votes.len(), g.schema().class_count() as usize);
        prop_assert!(votes.iter().all(|v| *v >= 0.0));
        let kinds_match = e.instance.values.iter().zip(g.schema().attributes()).all(|(v, a)| {
            matches!((v, a.kind), (Value::Nominal(_), greenstream::AttributeKind::Nominal { .. }) | (Value::Numeric(_), greenstream::AttributeKind::Numeric))
        });
        prop_assert!(kinds_match);
    }
}
