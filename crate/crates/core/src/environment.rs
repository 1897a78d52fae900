//! Hidden reward process and the censored semi-bandit feedback channel.

use rand::Rng;

use crate::domain::{Allocation, ProblemInstance, RewardKind, RoundFeedback};
use crate::error::{Error, Result};
use crate::rng::{self, Stream, StreamRng};

/// Simulated network: draws a reward for every arm each round and reveals
/// only the ones whose allocation met the threshold.
#[derive(Debug, Clone)]
pub struct Environment {
    instance: ProblemInstance,
    rng: StreamRng,
    round: u64,
}

impl Environment {
    pub fn new(instance: ProblemInstance, seed: u64) -> Self {
        Environment {
            instance,
            rng: rng::stream(seed, Stream::Rewards),
            round: 0,
        }
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    /// Number of rounds played so far.
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Plays one round with allocation `x`.
    ///
    /// Rewards are drawn for every arm whether or not it is served. Two
    /// policies run on the same seed face the same reward sequence.
    pub fn step(&mut self, x: &Allocation) -> Result<RoundFeedback> {
        let inst = &self.instance;
        x.check_feasible(inst.num_arms(), inst.capacity)?;
        self.round += 1;
        let mut observed = Vec::with_capacity(inst.num_arms());
        for ((&mu, &theta), &amount) in inst
            .mean_rewards
            .iter()
            .zip(&inst.thresholds)
            .zip(x.amounts())
        {
            let y = draw_reward(&mut self.rng, inst.reward_kind, mu);
            observed.push(if amount >= theta { y } else { 0.0 });
        }
        let collected_reward = observed.iter().sum();
        Ok(RoundFeedback {
            round: self.round,
            observed,
            collected_reward,
        })
    }
}

fn draw_reward(rng: &mut StreamRng, kind: RewardKind, mu: f64) -> f64 {
    match kind {
        RewardKind::Bernoulli => {
            if rng.random::<f64>() < mu {
                1.0
            } else {
                0.0
            }
        }
        RewardKind::Uniform { halfwidth } => {
            let u: f64 = rng.random();
            (mu + halfwidth * (2.0 * u - 1.0)).clamp(0.0, 1.0)
        }
    }
}

/// Turns a reward in `[0, 1]` into a Bernoulli(`y`) bit.
pub fn binarize<R: Rng + ?Sized>(y: f64, rng: &mut R) -> Result<bool> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::out_of_range("reward", y, "[0, 1]"));
    }
    Ok(rng.random::<f64>() < y)
}

/// `Σ μ_i 1{x_i ≥ θ_i}`: the expected reward of an allocation.
pub fn mean_reward_of_allocation(instance: &ProblemInstance, x: &Allocation) -> Result<f64> {
    x.check_feasible(instance.num_arms(), instance.capacity)?;
    Ok(served_value(
        &instance.mean_rewards,
        &instance.thresholds,
        x.amounts(),
    ))
}

pub(crate) fn served_value(mu: &[f64], theta: &[f64], x: &[f64]) -> f64 {
    mu.iter()
        .zip(theta)
        .zip(x)
        .filter(|((_, &t), &xi)| xi >= t)
        .map(|((&m, _), _)| m)
        .sum()
}

/// Arms whose uniform reward support reaches zero, which breaks the
/// single-zero rejection rule used in continuous-reward mode.
pub fn arms_with_zero_support(instance: &ProblemInstance) -> Vec<usize> {
    match instance.reward_kind {
        RewardKind::Bernoulli => Vec::new(),
        RewardKind::Uniform { halfwidth } => instance
            .mean_rewards
            .iter()
            .enumerate()
            .filter(|(_, &mu)| mu <= halfwidth)
            .map(|(i, _)| i)
            .collect(),
    }
}
