//! Randomised properties across modules.

use crate::closedform::moran_fixation;
use crate::dynamics::flip_probabilities;
use crate::montecarlo::{wilson_interval, Z95};
use crate::trainkinetics::{expected_train_length, train_dp_oracle, train_length_bounds};
use crate::{build_superstar, SuperstarSpec, UpdateRule};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wilson_brackets_the_point_estimate(n in 1u64..5000, frac in 0.0f64..=1.0) {
        let s = ((n as f64) * frac).round() as u64;
        let (lo, hi) = wilson_interval(s, n, Z95);
        let p = s as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12);
        prop_assert!(p - 1e-12 <= hi && hi <= 1.0);
    }

    #[test]
    fn train_sum_matches_grid(r in 1.01f64..8.0, h in 2usize..40) {
        let t = expected_train_length(r, h).unwrap();
        let dp = train_dp_oracle(r, h).unwrap();
        prop_assert!((t - dp).abs() <= 1e-10 * t.max(1.0), "T={t} dp={dp}");
        let (lo, hi) = train_length_bounds(r, h).unwrap();
        prop_assert!(lo <= t * (1.0 + 1e-12) && t <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn moran_increases_with_fitness(r in 1.01f64..5.0, dr in 0.01f64..1.0, n in 2usize..500) {
        prop_assert!(moran_fixation(r + dr, n).unwrap() > moran_fixation(r, n).unwrap());
    }

    #[test]
    fn superstar_layout(b in 1usize..8, l in 1usize..8, h in 2usize..6) {
        let g = build_superstar(SuperstarSpec::new(b, l, h).unwrap()).unwrap();
        prop_assert_eq!(g.node_count(), b * (l + h) + 1);
        prop_assert!(g.is_strongly_connected());
        prop_assert_eq!(g.reservoir_nodes().len(), b * l);
    }

    #[test]
    fn flip_mass_is_a_subprobability(mask in any::<u16>(), r in 0.2f64..5.0, rule_ix in 0usize..4) {
        let g = build_superstar(SuperstarSpec::new(2, 2, 3).unwrap()).unwrap();
        let n = g.node_count();
        let state: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let p = flip_probabilities(&g, &state, &r, UpdateRule::ALL[rule_ix]);
        let total: f64 = p.iter().map(|(_, x)| *x).sum();
        prop_assert!(p.iter().all(|(_, x)| *x >= 0.0));
        prop_assert!(total <= 1.0 + 1e-12);
        let mixed = state.iter().any(|&b| b) && state.iter().any(|&b| !b);
        prop_assert_eq!(total > 0.0, mixed);
    }
}
