//! Same-threshold policy (ONUM-ST).
//!
//! When every arm shares one unknown threshold `θ_s`, an optimal allocation
//! gives `C/M` to each of the `M` best arms for some `M ≤ K`, so the search
//! runs over the `K` candidates `Θ = {C/K, C/(K-1), …, C}`. The policy
//! binary-searches `Θ` while running multiple-play Thompson sampling:
//!
//! * any reward on an allocated arm proves the current candidate covers the
//!   threshold, so the upper end moves down to it (no risk);
//! * `W_δ` consecutive rounds with no reward anywhere are taken as evidence of
//!   under-allocation and the lower end moves up (wrong with probability ≤ δ).
//!
//! Zeros seen during a streak are ambiguous. They are kept in per-arm
//! counters and charged as failures only once a reward confirms the
//! allocation was sufficient. After the search converges the policy is plain
//! MP-TS.

use crate::domain::{Allocation, BetaPosterior, RoundFeedback};
use crate::environment::binarize;
use crate::error::{Error, Result};
use crate::oracle::{same_threshold_candidates, w_delta_st};
use crate::policy::{rank_by_sample, sample_posterior, Policy, RoundClock};
use crate::rng::{self, Stream, StreamRng};

/// How observed rewards feed the posteriors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardMode {
    /// Rewards are 0/1; `W_δ` comes from the confidence formula.
    Binary,
    /// Rewards have support in `(0, 1]` when served: a single zero already
    /// proves under-allocation (`W_δ = 1`), and rewards are binarized before
    /// they reach the Beta posteriors.
    Continuous,
}

/// Binary-search bookkeeping over the candidate set.
///
/// Positions are 1-based: `candidate(p) = C / (K - p + 1)`, so position `K`
/// is `C` itself and the search starts with `lower = 0`, `upper = K`.
#[derive(Debug, Clone, PartialEq)]
pub struct StSearchState {
    pub theta_set: Vec<f64>,
    pub lower: usize,
    pub upper: usize,
    pub current: usize,
    pub consecutive_zero_rounds: u64,
    pub zero_streak: Vec<u64>,
    pub w_delta: u64,
}

impl StSearchState {
    fn new(capacity: f64, num_arms: usize, w_delta: u64) -> Self {
        StSearchState {
            theta_set: same_threshold_candidates(capacity, num_arms),
            lower: 0,
            upper: num_arms,
            current: num_arms.div_ceil(2),
            consecutive_zero_rounds: 0,
            zero_streak: vec![0; num_arms],
            w_delta,
        }
    }

    pub fn converged(&self) -> bool {
        self.current == self.upper
    }

    pub fn theta_hat(&self) -> f64 {
        self.theta_set[self.current - 1]
    }

    /// Number of arms served at the current candidate, `K - j + 1`.
    pub fn served_arms(&self) -> usize {
        self.theta_set.len() - self.current + 1
    }

    fn move_down(&mut self) {
        self.upper = self.current;
        self.current = self.upper - (self.upper - self.lower) / 2;
        self.consecutive_zero_rounds = 0;
    }

    fn move_up(&mut self) {
        self.lower = self.current;
        self.current = self.lower + (self.upper - self.lower).div_ceil(2);
        self.consecutive_zero_rounds = 0;
        self.zero_streak.fill(0);
    }
}

#[derive(Debug, Clone)]
pub struct SameThresholdPolicy {
    capacity: f64,
    search: StSearchState,
    posterior: BetaPosterior,
    mode: RewardMode,
    sampler: StreamRng,
    coin: StreamRng,
    clock: RoundClock,
    served: Vec<usize>,
    converged_at: Option<u64>,
}

impl SameThresholdPolicy {
    /// Fresh policy: Beta(1, 1) priors, search at the middle of `Θ`.
    pub fn new(
        num_arms: usize,
        capacity: f64,
        delta: f64,
        epsilon: f64,
        seed: u64,
        mode: RewardMode,
    ) -> Result<Self> {
        if !(capacity > 0.0 && capacity.is_finite()) {
            return Err(Error::out_of_range("capacity", capacity, "(0, inf)"));
        }
        let formula = w_delta_st(num_arms, delta, epsilon)?;
        let w_delta = match mode {
            RewardMode::Binary => formula,
            RewardMode::Continuous => 1,
        };
        Ok(Self::from_search(
            capacity,
            StSearchState::new(capacity, num_arms, w_delta),
            seed,
            mode,
        ))
    }

    /// MP-TS with an already known allocation-equivalent threshold
    /// `theta_hat ∈ Θ`: the converged state of [`SameThresholdPolicy::new`].
    pub fn known(
        num_arms: usize,
        capacity: f64,
        theta_hat: f64,
        seed: u64,
        mode: RewardMode,
    ) -> Result<Self> {
        if num_arms == 0 {
            return Err(Error::NoArms);
        }
        if !(capacity > 0.0 && theta_hat > 0.0 && theta_hat <= capacity) {
            return Err(Error::out_of_range(
                "theta_hat",
                theta_hat,
                format!("(0, {capacity}]"),
            ));
        }
        let served = (capacity / theta_hat).round();
        let fits = served >= 1.0
            && served <= num_arms as f64
            && (capacity / served - theta_hat).abs() <= 1e-9 * capacity.max(1.0);
        if !fits {
            return Err(Error::InvalidParameter(format!(
                "theta_hat = {theta_hat} is not of the form C/M with 1 <= M <= {num_arms}"
            )));
        }
        let mut search = StSearchState::new(capacity, num_arms, 1);
        let position = num_arms - served as usize + 1;
        search.lower = position;
        search.upper = position;
        search.current = position;
        let mut policy = Self::from_search(capacity, search, seed, mode);
        policy.converged_at = Some(0);
        Ok(policy)
    }

    fn from_search(capacity: f64, search: StSearchState, seed: u64, mode: RewardMode) -> Self {
        let k = search.theta_set.len();
        SameThresholdPolicy {
            capacity,
            search,
            posterior: BetaPosterior::uniform(k),
            mode,
            sampler: rng::stream(seed, Stream::Posterior),
            coin: rng::stream(seed, Stream::Binarize),
            clock: RoundClock::default(),
            served: Vec::new(),
            converged_at: None,
        }
    }

    pub fn search(&self) -> &StSearchState {
        &self.search
    }

    pub fn posterior(&self) -> &BetaPosterior {
        &self.posterior
    }

    pub fn converged(&self) -> bool {
        self.search.converged()
    }

    pub fn theta_hat(&self) -> f64 {
        self.search.theta_hat()
    }

    pub fn w_delta(&self) -> u64 {
        self.search.w_delta
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    fn posterior_bit(&mut self, reward: f64) -> Result<bool> {
        match self.mode {
            RewardMode::Binary => Ok(reward > 0.0),
            RewardMode::Continuous => binarize(reward, &mut self.coin),
        }
    }
}

impl Policy for SameThresholdPolicy {
    fn num_arms(&self) -> usize {
        self.search.theta_set.len()
    }

    fn select(&mut self) -> Allocation {
        self.clock.start();
        let samples = sample_posterior(&self.posterior, &mut self.sampler);
        let n = self.search.served_arms();
        let amount = self.search.theta_hat();
        self.served = rank_by_sample(&samples).into_iter().take(n).collect();
        let mut x = vec![0.0; samples.len()];
        for &i in &self.served {
            x[i] = amount;
        }
        Allocation::new(x)
    }

    fn update(&mut self, feedback: &RoundFeedback) -> Result<()> {
        self.clock.finish(feedback, self.num_arms())?;
        let served = std::mem::take(&mut self.served);

        if self.search.converged() {
            for &i in &served {
                let bit = self.posterior_bit(feedback.observed[i])?;
                self.posterior.observe(i, bit);
            }
            self.served = served;
            return Ok(());
        }

        let rewarded = served.iter().any(|&i| feedback.observed[i] > 0.0);
        if rewarded {
            self.search.move_down();
            let mut is_served = vec![false; self.num_arms()];
            for &i in &served {
                is_served[i] = true;
                let bit = self.posterior_bit(feedback.observed[i])?;
                self.posterior.successes[i] += f64::from(u8::from(bit));
                self.posterior.failures[i] +=
                    f64::from(u8::from(!bit)) + self.search.zero_streak[i] as f64;
            }
            for (k, served_k) in is_served.iter().enumerate() {
                if !served_k {
                    self.posterior.failures[k] += self.search.zero_streak[k] as f64;
                }
            }
            self.search.zero_streak.fill(0);
        } else {
            self.search.consecutive_zero_rounds += 1;
            for &i in &served {
                self.search.zero_streak[i] += 1;
            }
            if self.search.consecutive_zero_rounds >= self.search.w_delta {
                self.search.move_up();
            }
        }
        if self.search.converged() {
            self.converged_at = Some(self.clock.round());
        }
        self.served = served;
        Ok(())
    }

    fn convergence_round(&self) -> Option<u64> {
        self.converged_at
    }
}
