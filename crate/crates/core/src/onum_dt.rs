//! Different-thresholds policy (ONUM-DT).
//!
//! Each arm runs its own binary search for a threshold estimate on `[0, C]`
//! until the bracket `[low, high]` is no wider than `γ`; the estimate is
//! then `high`, which is never below the true threshold because `high` only
//! moves to amounts at which a reward was observed. While some arm is still
//! searching, every round probes:
//!
//! * searching ("bad") arms get the midpoint of their bracket when it fits
//!   after all higher-priority searching arms (event `B_i`);
//! * finished ("good") arms get their estimate when it fits after every
//!   searching arm and all higher-priority finished arms (event `G_i`);
//! * everybody else gets nothing.
//!
//! Priority is the Thompson sample divided by the amount requested, ties by
//! lower index. Once every arm is good the policy is combinatorial Thompson
//! sampling with the exact knapsack oracle over the estimates.

use crate::domain::{feasibility_tolerance, Allocation, BetaPosterior, RoundFeedback};
use crate::environment::binarize;
use crate::error::{Error, Result};
use crate::onum_st::RewardMode;
use crate::oracle::{solve_knapsack, w_delta_dt};
use crate::policy::{sample_posterior, Policy, RoundClock};
use crate::rng::{self, Stream, StreamRng};

/// Search bookkeeping of one arm.
#[derive(Debug, Clone, PartialEq)]
pub struct DtArmSearchState {
    /// Committed estimate; meaningful once `is_good`.
    pub theta_hat: f64,
    /// Amount given in the latest round.
    pub theta_current: f64,
    pub theta_low: f64,
    pub theta_high: f64,
    pub is_good: bool,
    pub zero_streak: u64,
}

impl DtArmSearchState {
    fn new(capacity: f64, num_arms: usize) -> Self {
        DtArmSearchState {
            theta_hat: capacity,
            theta_current: capacity / num_arms as f64,
            theta_low: 0.0,
            theta_high: capacity,
            is_good: false,
            zero_streak: 0,
        }
    }

    /// Amount this arm asks for: its bracket midpoint while searching, its
    /// estimate afterwards.
    pub fn candidate(&self) -> f64 {
        if self.is_good {
            self.theta_high
        } else {
            0.5 * (self.theta_low + self.theta_high)
        }
    }

    fn settle(&mut self, gamma: f64) {
        if !self.is_good && self.theta_high - self.theta_low <= gamma {
            self.is_good = true;
            self.theta_hat = self.theta_high;
        }
    }
}

/// Per-round events computed from the Thompson samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DtEvents {
    pub candidate: Vec<f64>,
    /// `B_i`: searching arm `i` fits behind higher-priority searching arms.
    pub bad_fits: Vec<bool>,
    /// `G_i`: finished arm `i` fits behind all searching arms and
    /// higher-priority finished arms.
    pub good_fits: Vec<bool>,
    /// `E_θ`: every arm has a good estimate.
    pub all_good: bool,
}

/// Evaluates `B_i`, `G_i` and `E_θ` on the candidate amounts.
pub fn compute_events(arms: &[DtArmSearchState], samples: &[f64], capacity: f64) -> DtEvents {
    let k = arms.len();
    let candidate: Vec<f64> = arms.iter().map(DtArmSearchState::candidate).collect();
    let ratio: Vec<f64> = (0..k)
        .map(|i| {
            if candidate[i] > 0.0 {
                samples[i] / candidate[i]
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let precedes = |j: usize, i: usize| ratio[j] > ratio[i] || (ratio[j] == ratio[i] && j < i);
    let limit = capacity + feasibility_tolerance(capacity);
    let all_good = arms.iter().all(|a| a.is_good);
    let bad_total: f64 = (0..k)
        .filter(|&j| !arms[j].is_good)
        .map(|j| candidate[j])
        .sum();

    let mut bad_fits = vec![false; k];
    let mut good_fits = vec![false; k];
    for i in 0..k {
        if arms[i].is_good {
            let ahead: f64 = (0..k)
                .filter(|&j| arms[j].is_good && precedes(j, i))
                .map(|j| candidate[j])
                .sum();
            good_fits[i] = candidate[i] + bad_total + ahead <= limit;
        } else {
            debug_assert!(candidate[i] > 0.0, "searching arm with empty bracket");
            let ahead: f64 = (0..k)
                .filter(|&j| !arms[j].is_good && precedes(j, i))
                .map(|j| candidate[j])
                .sum();
            bad_fits[i] = candidate[i] + ahead <= limit;
        }
    }
    DtEvents {
        candidate,
        bad_fits,
        good_fits,
        all_good,
    }
}

#[derive(Debug, Clone)]
enum Pending {
    Idle,
    Search,
    Exploit(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct DifferentThresholdPolicy {
    capacity: f64,
    gamma: f64,
    w_delta: u64,
    arms: Vec<DtArmSearchState>,
    posterior: BetaPosterior,
    mode: RewardMode,
    sampler: StreamRng,
    coin: StreamRng,
    clock: RoundClock,
    pending: Pending,
    converged_at: Option<u64>,
    pinned_means: Option<Vec<f64>>,
}

impl DifferentThresholdPolicy {
    pub fn new(
        num_arms: usize,
        capacity: f64,
        delta: f64,
        epsilon: f64,
        gamma: f64,
        seed: u64,
        mode: RewardMode,
    ) -> Result<Self> {
        if !(capacity > 0.0 && capacity.is_finite()) {
            return Err(Error::out_of_range("capacity", capacity, "(0, inf)"));
        }
        let formula = w_delta_dt(num_arms, capacity, gamma, delta, epsilon)?;
        let w_delta = match mode {
            RewardMode::Binary => formula,
            RewardMode::Continuous => 1,
        };
        let mut arms = vec![DtArmSearchState::new(capacity, num_arms); num_arms];
        for arm in &mut arms {
            arm.settle(gamma);
        }
        let mut policy = Self::from_arms(capacity, gamma, w_delta, arms, seed, mode);
        if policy.converged() {
            policy.converged_at = Some(0);
        }
        Ok(policy)
    }

    /// CTS with known thresholds: every arm starts good at `thresholds[i]`.
    pub fn known(thresholds: &[f64], capacity: f64, seed: u64, mode: RewardMode) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::NoArms);
        }
        for (i, &t) in thresholds.iter().enumerate() {
            if !(0.0..=capacity).contains(&t) {
                return Err(Error::out_of_range(
                    format!("thresholds[{i}]"),
                    t,
                    format!("[0, {capacity}]"),
                ));
            }
        }
        let arms = thresholds
            .iter()
            .map(|&t| DtArmSearchState {
                theta_hat: t,
                theta_current: t,
                theta_low: t,
                theta_high: t,
                is_good: true,
                zero_streak: 0,
            })
            .collect();
        let mut policy = Self::from_arms(capacity, 0.0, 1, arms, seed, mode);
        policy.converged_at = Some(0);
        Ok(policy)
    }

    /// Replaces the Thompson samples fed to the knapsack oracle with fixed
    /// means. With the true means and thresholds this is the optimal policy.
    pub fn with_pinned_means(mut self, means: Vec<f64>) -> Result<Self> {
        if means.len() != self.arms.len() {
            return Err(Error::DimensionMismatch {
                what: "pinned means",
                expected: self.arms.len(),
                got: means.len(),
            });
        }
        self.pinned_means = Some(means);
        Ok(self)
    }

    fn from_arms(
        capacity: f64,
        gamma: f64,
        w_delta: u64,
        arms: Vec<DtArmSearchState>,
        seed: u64,
        mode: RewardMode,
    ) -> Self {
        let k = arms.len();
        DifferentThresholdPolicy {
            capacity,
            gamma,
            w_delta,
            arms,
            posterior: BetaPosterior::uniform(k),
            mode,
            sampler: rng::stream(seed, Stream::Posterior),
            coin: rng::stream(seed, Stream::Binarize),
            clock: RoundClock::default(),
            pending: Pending::Idle,
            converged_at: None,
            pinned_means: None,
        }
    }

    pub fn arms(&self) -> &[DtArmSearchState] {
        &self.arms
    }

    pub fn posterior(&self) -> &BetaPosterior {
        &self.posterior
    }

    pub fn w_delta(&self) -> u64 {
        self.w_delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// True once every arm has a good estimate.
    pub fn converged(&self) -> bool {
        self.arms.iter().all(|a| a.is_good)
    }

    /// Committed estimates `θ̂`.
    pub fn theta_hat(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.theta_hat).collect()
    }

    fn posterior_bit(&mut self, reward: f64) -> Result<bool> {
        match self.mode {
            RewardMode::Binary => Ok(reward > 0.0),
            RewardMode::Continuous => binarize(reward, &mut self.coin),
        }
    }

    fn update_search(&mut self, observed: &[f64]) -> Result<()> {
        for (i, &y) in observed.iter().enumerate() {
            let amount = self.arms[i].theta_current;
            if !self.arms[i].is_good && amount > 0.0 {
                if y > 0.0 {
                    let bit = self.posterior_bit(y)?;
                    let arm = &mut self.arms[i];
                    arm.theta_high = amount;
                    self.posterior.successes[i] += f64::from(u8::from(bit));
                    self.posterior.failures[i] +=
                        f64::from(u8::from(!bit)) + arm.zero_streak as f64;
                    arm.zero_streak = 0;
                } else {
                    let arm = &mut self.arms[i];
                    arm.zero_streak += 1;
                    if arm.zero_streak >= self.w_delta {
                        arm.theta_low = amount;
                        arm.zero_streak = 0;
                    }
                }
                self.arms[i].settle(self.gamma);
            } else if self.arms[i].is_good && amount > 0.0 && amount == self.arms[i].theta_hat {
                let bit = self.posterior_bit(y)?;
                self.posterior.observe(i, bit);
            }
        }
        Ok(())
    }
}

impl Policy for DifferentThresholdPolicy {
    fn num_arms(&self) -> usize {
        self.arms.len()
    }

    fn select(&mut self) -> Allocation {
        self.clock.start();
        let samples = sample_posterior(&self.posterior, &mut self.sampler);
        if self.converged() {
            let scores = self.pinned_means.as_ref().unwrap_or(&samples);
            let estimates = self.theta_hat();
            let chosen = solve_knapsack(scores, &estimates, self.capacity)
                .expect("estimates are validated nonnegative")
                .selected;
            let mut x = vec![0.0; self.arms.len()];
            for arm in &mut self.arms {
                arm.theta_current = 0.0;
            }
            for &i in &chosen {
                x[i] = estimates[i];
                self.arms[i].theta_current = estimates[i];
            }
            self.pending = Pending::Exploit(chosen);
            return Allocation::new(x);
        }

        let events = compute_events(&self.arms, &samples, self.capacity);
        let x: Vec<f64> = (0..self.arms.len())
            .map(|i| {
                if events.good_fits[i] || events.bad_fits[i] {
                    events.candidate[i]
                } else {
                    0.0
                }
            })
            .collect();
        for (arm, &amount) in self.arms.iter_mut().zip(&x) {
            arm.theta_current = amount;
        }
        self.pending = Pending::Search;
        Allocation::new(x)
    }

    fn update(&mut self, feedback: &RoundFeedback) -> Result<()> {
        self.clock.finish(feedback, self.num_arms())?;
        match std::mem::replace(&mut self.pending, Pending::Idle) {
            Pending::Idle => unreachable!("clock guarantees a pending selection"),
            Pending::Search => {
                self.update_search(&feedback.observed)?;
                if self.converged() && self.converged_at.is_none() {
                    self.converged_at = Some(self.clock.round());
                }
            }
            Pending::Exploit(chosen) => {
                for i in chosen {
                    let bit = self.posterior_bit(feedback.observed[i])?;
                    self.posterior.observe(i, bit);
                }
            }
        }
        Ok(())
    }

    fn convergence_round(&self) -> Option<u64> {
        self.converged_at
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feedback(round: u64, observed: Vec<f64>) -> RoundFeedback {
        let collected_reward = observed.iter().sum();
        RoundFeedback {
            round,
            observed,
            collected_reward,
        }
    }

    fn bad(low: f64, high: f64) -> DtArmSearchState {
        DtArmSearchState {
            theta_hat: high,
            theta_current: 0.0,
            theta_low: low,
            theta_high: high,
            is_good: false,
            zero_streak: 0,
        }
    }

    fn good(theta: f64) -> DtArmSearchState {
        DtArmSearchState {
            theta_hat: theta,
            theta_current: 0.0,
            theta_low: theta,
            theta_high: theta,
            is_good: true,
            zero_streak: 0,
        }
    }

    #[test]
    fn init_values() {
        let p =
            DifferentThresholdPolicy::new(5, 2.0, 0.1, 0.1, 1e-3, 0, RewardMode::Binary).unwrap();
        assert_eq!(p.w_delta(), 60);
        let total: f64 = p.arms().iter().map(|a| a.theta_current).sum();
        assert!((total - 2.0).abs() < 1e-12);
        assert!(p
            .arms()
            .iter()
            .all(|a| a.theta_low == 0.0 && a.theta_high == 2.0 && !a.is_good));
        assert!(!p.converged());
        assert!(
            DifferentThresholdPolicy::new(5, 2.0, 0.1, 0.1, 0.0, 0, RewardMode::Binary).is_err()
        );
        let p = DifferentThresholdPolicy::new(10, 3.0, 0.1, 0.1, 1e-3, 0, RewardMode::Continuous)
            .unwrap();
        assert_eq!(p.w_delta(), 1);
    }

    #[test]
    fn single_bad_arm_fits() {
        let ev = compute_events(&[bad(0.0, 2.0)], &[0.3], 2.0);
        assert_eq!(ev.candidate, vec![1.0]);
        assert!(ev.bad_fits[0]);
        assert!(!ev.all_good);
    }

    #[test]
    fn priority_by_ratio() {
        // c = (0.6, 0.6), C = 1: only the higher-ratio arm fits.
        let arms = [bad(0.0, 1.2), bad(0.0, 1.2)];
        let ev = compute_events(&arms, &[0.9, 0.1], 1.0);
        assert_eq!(ev.bad_fits, vec![true, false]);
        let ev = compute_events(&arms, &[0.1, 0.9], 1.0);
        assert_eq!(ev.bad_fits, vec![false, true]);
        // Equal ratios: lower index first.
        let ev = compute_events(&arms, &[0.5, 0.5], 1.0);
        assert_eq!(ev.bad_fits, vec![true, false]);
    }

    #[test]
    fn all_good_sets_e_theta() {
        let ev = compute_events(&[good(0.3), good(0.4)], &[0.5, 0.5], 1.0);
        assert!(ev.all_good);
        assert_eq!(ev.bad_fits, vec![false, false]);
    }

    #[test]
    fn good_arms_yield_to_every_searching_arm() {
        // Searching arm asks 0.5 regardless of priority; the good arm must fit behind it.
        let arms = [good(0.6), bad(0.0, 1.0)];
        let ev = compute_events(&arms, &[0.99, 0.01], 1.0);
        assert!(ev.bad_fits[1]);
        assert!(!ev.good_fits[0]);
        let arms = [good(0.4), bad(0.0, 1.0)];
        let ev = compute_events(&arms, &[0.99, 0.01], 1.0);
        assert!(ev.good_fits[0]);
    }

    #[test]
    fn events_pack_within_capacity() {
        let arms = [
            bad(0.0, 1.6),
            bad(0.2, 0.9),
            good(0.3),
            bad(0.0, 0.4),
            good(0.25),
        ];
        for s in 0..50 {
            let samples: Vec<f64> = (0..5)
                .map(|i| ((s * 7 + i * 13) % 17) as f64 / 17.0)
                .collect();
            let ev = compute_events(&arms, &samples, 1.0);
            let used: f64 = (0..5)
                .filter(|&i| ev.bad_fits[i] || ev.good_fits[i])
                .map(|i| ev.candidate[i])
                .sum();
            assert!(used <= 1.0 + 1e-9);
        }
    }

    fn forced(policy: &mut DifferentThresholdPolicy, state: DtArmSearchState) {
        policy.arms[0] = state;
    }

    #[test]
    fn reward_after_zeros_lowers_upper_bound() {
        let mut p =
            DifferentThresholdPolicy::new(1, 2.0, 0.1, 0.1, 1e-3, 5, RewardMode::Binary).unwrap();
        forced(
            &mut p,
            DtArmSearchState {
                zero_streak: 5,
                ..bad(0.0, 1.6)
            },
        );
        let x = p.select();
        assert_eq!(x.amounts(), &[0.8]);
        p.update(&feedback(1, vec![1.0])).unwrap();
        let arm = &p.arms()[0];
        assert_eq!(arm.theta_high, 0.8);
        assert_eq!(arm.zero_streak, 0);
        assert_eq!(p.posterior().successes[0], 2.0);
        assert_eq!(p.posterior().failures[0], 6.0);
    }

    #[test]
    fn w_delta_zeros_raise_lower_bound() {
        let mut p =
            DifferentThresholdPolicy::new(1, 0.8, 0.1, 0.1, 1e-3, 5, RewardMode::Binary).unwrap();
        let w = p.w_delta();
        forced(
            &mut p,
            DtArmSearchState {
                zero_streak: w - 1,
                ..bad(0.0, 0.4)
            },
        );
        let x = p.select();
        assert_eq!(x.amounts(), &[0.2]);
        p.update(&feedback(1, vec![0.0])).unwrap();
        let arm = &p.arms()[0];
        assert_eq!(arm.theta_low, 0.2);
        assert_eq!(arm.zero_streak, 0);
        assert_eq!(p.posterior(), &BetaPosterior::uniform(1));
    }

    #[test]
    fn narrow_bracket_marks_arm_good() {
        let gamma = 1e-3;
        let mut p =
            DifferentThresholdPolicy::new(1, 1.0, 0.1, 0.1, gamma, 5, RewardMode::Binary).unwrap();
        forced(&mut p, bad(0.5, 0.5 + gamma));
        p.select();
        // Reward at the midpoint halves the bracket to γ/2.
        p.update(&feedback(1, vec![1.0])).unwrap();
        let arm = p.arms()[0].clone();
        assert!(arm.is_good);
        assert_eq!(arm.theta_hat, arm.theta_high);
        assert!((arm.theta_high - arm.theta_low - gamma / 2.0).abs() < 1e-12);
        assert_eq!(p.convergence_round(), Some(1));
        // Frozen afterwards.
        for t in 2..10 {
            p.select();
            p.update(&feedback(t, vec![0.0])).unwrap();
        }
        assert_eq!(p.arms()[0].theta_hat, arm.theta_hat);
        assert_eq!(p.theta_hat(), vec![arm.theta_hat]);
    }

    #[test]
    fn known_thresholds_pick_knapsack_optimum() {
        let mut p = DifferentThresholdPolicy::known(&[0.6, 0.55, 0.45], 1.0, 0, RewardMode::Binary)
            .unwrap()
            .with_pinned_means(vec![0.9, 0.6, 0.4])
            .unwrap();
        for t in 1..=20 {
            let x = p.select();
            assert_eq!(x.amounts(), &[0.0, 0.55, 0.45]);
            p.update(&feedback(t, vec![0.0, 1.0, 0.0])).unwrap();
        }
    }

    #[test]
    fn unserved_bad_arm_gets_nothing_and_no_update() {
        let mut p =
            DifferentThresholdPolicy::new(2, 1.0, 0.1, 0.1, 1e-3, 5, RewardMode::Binary).unwrap();
        p.arms[0] = bad(0.0, 1.8);
        p.arms[1] = bad(0.0, 1.8);
        let x = p.select();
        let served = x.amounts().iter().filter(|&&a| a > 0.0).count();
        assert_eq!(served, 1);
        let idle = x.amounts().iter().position(|&a| a == 0.0).unwrap();
        p.update(&feedback(1, vec![0.0, 0.0])).unwrap();
        assert_eq!(p.arms()[idle].zero_streak, 0);
        assert_eq!(p.arms()[1 - idle].zero_streak, 1);
    }
}
