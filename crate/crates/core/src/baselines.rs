//! Reference policies for regret comparisons.
//!
//! The two "known threshold" baselines are the main policies started in
//! their converged state.

use rand::seq::SliceRandom;

use crate::domain::{feasibility_tolerance, Allocation, RoundFeedback};
use crate::error::{Error, Result};
use crate::onum_dt::DifferentThresholdPolicy;
use crate::onum_st::{RewardMode, SameThresholdPolicy};
use crate::policy::{Policy, RoundClock};
use crate::rng::{self, Stream, StreamRng};

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineKind {
    /// Multiple-play Thompson sampling with a known equivalent threshold.
    MpTsKnown(f64),
    /// Combinatorial Thompson sampling with known per-arm thresholds.
    CtsKnown(Vec<f64>),
    /// Serves a random maximal packable set of arms with the given thresholds.
    RandomFeasible(Vec<f64>),
}

pub fn baseline_policy(
    kind: BaselineKind,
    num_arms: usize,
    capacity: f64,
    seed: u64,
    mode: RewardMode,
) -> Result<Box<dyn Policy>> {
    let check_len = |v: &[f64]| {
        if v.len() == num_arms {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                what: "baseline thresholds",
                expected: num_arms,
                got: v.len(),
            })
        }
    };
    Ok(match kind {
        BaselineKind::MpTsKnown(theta_hat) => Box::new(SameThresholdPolicy::known(
            num_arms, capacity, theta_hat, seed, mode,
        )?),
        BaselineKind::CtsKnown(thresholds) => {
            check_len(&thresholds)?;
            Box::new(DifferentThresholdPolicy::known(
                &thresholds,
                capacity,
                seed,
                mode,
            )?)
        }
        BaselineKind::RandomFeasible(thresholds) => {
            check_len(&thresholds)?;
            Box::new(RandomFeasiblePolicy::new(thresholds, capacity, seed)?)
        }
    })
}

/// Shuffles the arms and greedily serves each one whose threshold still
/// fits. The result is always a maximal packable set.
#[derive(Debug, Clone)]
pub struct RandomFeasiblePolicy {
    thresholds: Vec<f64>,
    capacity: f64,
    rng: StreamRng,
    clock: RoundClock,
}

impl RandomFeasiblePolicy {
    pub fn new(thresholds: Vec<f64>, capacity: f64, seed: u64) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::NoArms);
        }
        if let Some((i, &t)) = thresholds
            .iter()
            .enumerate()
            .find(|(_, &t)| !(0.0..=capacity).contains(&t))
        {
            return Err(Error::out_of_range(
                format!("thresholds[{i}]"),
                t,
                format!("[0, {capacity}]"),
            ));
        }
        Ok(RandomFeasiblePolicy {
            thresholds,
            capacity,
            rng: rng::stream(seed, Stream::Baseline),
            clock: RoundClock::default(),
        })
    }
}

/// Greedy packing of `order` under `capacity`.
pub(crate) fn greedy_pack(order: &[usize], thresholds: &[f64], capacity: f64) -> Vec<f64> {
    let limit = capacity + feasibility_tolerance(capacity);
    let mut x = vec![0.0; thresholds.len()];
    let mut used = 0.0;
    for &i in order {
        if used + thresholds[i] <= limit {
            used += thresholds[i];
            x[i] = thresholds[i];
        }
    }
    x
}

impl Policy for RandomFeasiblePolicy {
    fn num_arms(&self) -> usize {
        self.thresholds.len()
    }

    fn select(&mut self) -> Allocation {
        self.clock.start();
        let mut order: Vec<usize> = (0..self.thresholds.len()).collect();
        order.shuffle(&mut self.rng);
        Allocation::new(greedy_pack(&order, &self.thresholds, self.capacity))
    }

    fn update(&mut self, feedback: &RoundFeedback) -> Result<()> {
        self.clock.finish(feedback, self.num_arms())
    }
}
