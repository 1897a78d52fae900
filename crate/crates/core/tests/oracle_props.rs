mod common;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use common::{brute_force_knapsack, brute_force_min_cardinality};
use onum::harness::builtin_instance;
use onum::harness::output::{config_from_toml, config_to_toml};
use onum::oracle::{
    allocation_equivalent_same, kl_bernoulli, max_feasible_cardinality, max_gap,
    min_optimal_cardinality, solve_knapsack, suboptimality_gap, verify_allocation_equivalent,
};
use onum::{Allocation, RewardKind};

fn instance(max_k: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (1..=max_k).prop_flat_map(|k| {
        (
            prop::collection::vec(0.0..1.0f64, k),
            prop::collection::vec(0.0..1.0f64, k),
            0.05..1.0f64,
        )
            .prop_map(|(mu, theta, frac)| {
                let c = theta.iter().sum::<f64>() * frac + 1e-3;
                (mu, theta, c)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn knapsack_matches_enumeration((mu, theta, c) in instance(14)) {
        let sol = solve_knapsack(&mu, &theta, c).unwrap();
        prop_assert_eq!(sol.total_value, brute_force_knapsack(&mu, &theta, c));
        prop_assert!(sol.total_weight <= c + 1e-9 * c.max(1.0));
        prop_assert!(sol.selected.windows(2).all(|w| w[0] < w[1]));
        let listed: f64 = sol.selected.iter().map(|&i| mu[i]).sum();
        prop_assert_eq!(listed, sol.total_value);
        prop_assert!(sol.leftover >= 0.0);
        let spread = sol.gamma_star * mu.len() as f64;
        prop_assert!((spread - sol.leftover).abs() <= 1e-12 * sol.leftover.max(1.0));
    }

    #[test]
    fn cardinalities((mu, theta, c) in instance(10)) {
        let k_star = min_optimal_cardinality(&mu, &theta, c).unwrap();
        prop_assert_eq!(k_star, brute_force_min_cardinality(&mu, &theta, c));
        prop_assert!(k_star <= max_feasible_cardinality(&theta, c));
    }

    #[test]
    fn gaps_are_nonnegative((mu, theta, c) in instance(10), mask in any::<u16>()) {
        let mut x = vec![0.0; mu.len()];
        let mut used = 0.0;
        for i in 0..mu.len() {
            if mask >> i & 1 == 1 && used + theta[i] <= c {
                used += theta[i];
                x[i] = theta[i];
            }
        }
        let gap = suboptimality_gap(&mu, &theta, c, &Allocation::new(x)).unwrap();
        prop_assert!(gap >= -1e-12);
        prop_assert!(gap <= max_gap(&mu, &theta, c).unwrap() + 1e-12);
    }

    #[test]
    fn same_threshold_equivalence(
        mu in prop::collection::vec(0.0..1.0f64, 2..30),
        theta_s in 0.01..1.0f64,
        spare in 0.0..20.0f64,
    ) {
        let k = mu.len();
        let c = theta_s + spare;
        let eq = allocation_equivalent_same(theta_s, c, k).unwrap();
        prop_assert!(eq.theta_hat >= theta_s - 1e-12);
        prop_assert!(eq.theta_set.contains(&eq.theta_hat));
        let a = vec![theta_s; k];
        let b = vec![eq.theta_hat; k];
        prop_assert!(verify_allocation_equivalent(&mu, &a, &b, c).unwrap());
    }

    #[test]
    fn slack_preserves_optimum((mu, theta, c) in instance(12), fracs in prop::collection::vec(0.0..=1.0f64, 12)) {
        let gamma_star = solve_knapsack(&mu, &theta, c).unwrap().gamma_star;
        let raised: Vec<f64> = theta.iter().zip(&fracs).map(|(&t, &f)| t + f * gamma_star).collect();
        prop_assert!(verify_allocation_equivalent(&mu, &theta, &raised, c).unwrap());
    }

    #[test]
    fn kl_is_nonnegative_and_convex(p in 0.0..=1.0f64, q in 0.001..0.999f64, r in 0.001..0.999f64) {
        let d = kl_bernoulli(p, q).unwrap();
        prop_assert!(d >= 0.0);
        let mid = 0.5 * (q + r);
        let lhs = kl_bernoulli(p, mid).unwrap();
        let rhs = 0.5 * (kl_bernoulli(p, q).unwrap() + kl_bernoulli(p, r).unwrap());
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn config_round_trips(id in 1u32..=3, uniform in any::<bool>(), horizon in 1u64..100_000, seed in any::<u32>()) {
        let mut cfg = builtin_instance(id).unwrap();
        cfg.horizon = horizon;
        cfg.base_seed = u64::from(seed);
        if uniform {
            cfg.instance.reward_kind = RewardKind::Uniform { halfwidth: 0.1 };
        }
        let back = config_from_toml(&config_to_toml(&cfg).unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn instance_optima_match_enumeration() {
    for (id, expected) in [(1, 16.94), (2, 2.39), (3, 4.42)] {
        let inst = builtin_instance(id).unwrap().instance;
        let (mu, theta, c) = (&inst.mean_rewards, &inst.thresholds, inst.capacity);
        let sol = solve_knapsack(mu, theta, c).unwrap();
        assert_abs_diff_eq!(sol.total_value, expected, epsilon = 1e-9);
        if inst.num_arms() <= 20 {
            assert_eq!(sol.total_value, brute_force_knapsack(mu, theta, c));
        } else {
            let top: f64 = mu[22..].iter().sum();
            assert_abs_diff_eq!(sol.total_value, top, epsilon = 1e-12);
        }
    }
}
