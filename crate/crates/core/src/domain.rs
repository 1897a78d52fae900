//! Value types shared by the environment, the policies, the oracle and the
//! harness. Nothing here does more than hold data and validate it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on `Σ x_i ≤ C` to absorb floating-point accumulation.
pub fn feasibility_tolerance(capacity: f64) -> f64 {
    1e-9 * capacity.max(1.0)
}

/// Reward distribution of every arm once it receives at least its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RewardKind {
    Bernoulli,
    /// Uniform on `[μ_i - halfwidth, μ_i + halfwidth]`, clamped to `[0, 1]`.
    Uniform {
        halfwidth: f64,
    },
}

impl RewardKind {
    pub fn is_continuous(&self) -> bool {
        matches!(self, RewardKind::Uniform { .. })
    }
}

/// Ground truth of one problem: means, thresholds and capacity.
///
/// Policies never see this value; only the environment and the harness do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub capacity: f64,
    pub mean_rewards: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub reward_kind: RewardKind,
}

impl ProblemInstance {
    pub fn new(
        capacity: f64,
        mean_rewards: Vec<f64>,
        thresholds: Vec<f64>,
        reward_kind: RewardKind,
    ) -> Result<Self> {
        let instance = ProblemInstance {
            capacity,
            mean_rewards,
            thresholds,
            reward_kind,
        };
        validate_instance(instance)
    }

    pub fn num_arms(&self) -> usize {
        self.mean_rewards.len()
    }

    /// The common threshold if every arm shares one.
    pub fn same_threshold(&self) -> Option<f64> {
        let first = *self.thresholds.first()?;
        self.thresholds.iter().all(|&t| t == first).then_some(first)
    }
}

/// Returns the instance unchanged iff all of its invariants hold.
pub fn validate_instance(instance: ProblemInstance) -> Result<ProblemInstance> {
    let k = instance.mean_rewards.len();
    if k == 0 {
        return Err(Error::NoArms);
    }
    if instance.thresholds.len() != k {
        return Err(Error::DimensionMismatch {
            what: "thresholds",
            expected: k,
            got: instance.thresholds.len(),
        });
    }
    let c = instance.capacity;
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::out_of_range("capacity", c, "[0, inf)"));
    }
    for (i, &mu) in instance.mean_rewards.iter().enumerate() {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::out_of_range(
                format!("mean_rewards[{i}]"),
                mu,
                "[0, 1]",
            ));
        }
    }
    for (i, &theta) in instance.thresholds.iter().enumerate() {
        if !(0.0..=c).contains(&theta) {
            return Err(Error::out_of_range(
                format!("thresholds[{i}]"),
                theta,
                format!("[0, {c}]"),
            ));
        }
    }
    if let RewardKind::Uniform { halfwidth } = instance.reward_kind {
        if !(halfwidth.is_finite() && halfwidth >= 0.0) {
            return Err(Error::out_of_range("halfwidth", halfwidth, "[0, inf)"));
        }
    }
    Ok(instance)
}

/// Per-arm resource amounts chosen for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation(Vec<f64>);

impl Allocation {
    pub fn new(amounts: Vec<f64>) -> Self {
        Allocation(amounts)
    }

    pub fn zeros(num_arms: usize) -> Self {
        Allocation(vec![0.0; num_arms])
    }

    pub fn amounts(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Checks length, per-arm range and the capacity constraint (with slack).
    pub fn check_feasible(&self, num_arms: usize, capacity: f64) -> Result<()> {
        if self.0.len() != num_arms {
            return Err(Error::DimensionMismatch {
                what: "allocation",
                expected: num_arms,
                got: self.0.len(),
            });
        }
        let tol = feasibility_tolerance(capacity);
        let used = self.total();
        let bad_entry = self.0.iter().any(|&x| !(x >= 0.0 && x <= capacity + tol));
        if bad_entry || used > capacity + tol {
            return Err(Error::Infeasible { used, capacity });
        }
        Ok(())
    }
}

/// What the learner sees after one round: censored per-arm rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundFeedback {
    pub round: u64,
    pub observed: Vec<f64>,
    pub collected_reward: f64,
}

/// Beta posteriors for every arm, started at Beta(1, 1).
///
/// Counts are stored as reals; every update in this crate adds integers.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaPosterior {
    pub successes: Vec<f64>,
    pub failures: Vec<f64>,
}

impl BetaPosterior {
    pub fn uniform(num_arms: usize) -> Self {
        BetaPosterior {
            successes: vec![1.0; num_arms],
            failures: vec![1.0; num_arms],
        }
    }

    pub fn len(&self) -> usize {
        self.successes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successes.is_empty()
    }

    /// Records one binary observation for `arm`.
    pub fn observe(&mut self, arm: usize, bit: bool) {
        if bit {
            self.successes[arm] += 1.0;
        } else {
            self.failures[arm] += 1.0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    OnumSt,
    OnumDt,
    MpTsKnown,
    CtsKnown,
    RandomBaseline,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::OnumSt,
        Algorithm::OnumDt,
        Algorithm::MpTsKnown,
        Algorithm::CtsKnown,
        Algorithm::RandomBaseline,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::OnumSt => "onum-st",
            Algorithm::OnumDt => "onum-dt",
            Algorithm::MpTsKnown => "mp-ts-known",
            Algorithm::CtsKnown => "cts-known",
            Algorithm::RandomBaseline => "random-baseline",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

fn default_gamma() -> f64 {
    1e-3
}

/// A complete, reproducible description of one experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub algorithm: Algorithm,
    pub horizon: u64,
    pub repeats: u32,
    pub base_seed: u64,
    pub delta: f64,
    pub epsilon: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// When set, δ is replaced by `T^(-(ln T)^(-alpha))` for horizon `T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_alpha: Option<f64>,
    pub instance: ProblemInstance,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        validate_instance(self.instance.clone())?;
        if self.horizon < 1 {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidParameter("repeats must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::out_of_range("delta", self.delta, "(0, 1)"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::out_of_range("epsilon", self.epsilon, "(0, 1]"));
        }
        if self.algorithm == Algorithm::OnumDt && !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::out_of_range("gamma", self.gamma, "(0, inf)"));
        }
        if let Some(alpha) = self.delta_alpha {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::out_of_range("delta_alpha", alpha, "(0, inf)"));
            }
        }
        Ok(())
    }

    /// δ actually handed to the policy, after the horizon-dependent preset.
    pub fn effective_delta(&self) -> f64 {
        match self.delta_alpha {
            Some(alpha) if self.horizon >= 3 => {
                let log_t = (self.horizon as f64).ln();
                (-log_t.powf(1.0 - alpha))
                    .exp()
                    .clamp(f64::MIN_POSITIVE, 1.0 - 1e-12)
            }
            _ => self.delta,
        }
    }
}

/// Cumulative pseudo-regret of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub cumulative: Vec<f64>,
    pub convergence_round: Option<u64>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_is_valid() {
        let inst = ProblemInstance::new(
            1.0,
            vec![0.9, 0.6, 0.4],
            vec![0.6, 0.55, 0.45],
            RewardKind::Bernoulli,
        );
        assert!(inst.is_ok());
    }

    #[test]
    fn zero_capacity_single_arm_is_legal() {
        let inst = ProblemInstance::new(0.0, vec![0.5], vec![0.0], RewardKind::Bernoulli).unwrap();
        assert_eq!(inst.num_arms(), 1);
    }

    #[test]
    fn rejects_mean_above_one() {
        let err = ProblemInstance::new(1.0, vec![0.5, 1.2], vec![0.1, 0.1], RewardKind::Bernoulli)
            .unwrap_err();
        assert!(matches!(err, Error::OutOfRange { ref what, .. } if what == "mean_rewards[1]"));
    }

    #[test]
    fn rejects_mismatch_and_empty() {
        let err = ProblemInstance::new(1.0, vec![0.5], vec![0.1, 0.1], RewardKind::Bernoulli)
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = ProblemInstance::new(1.0, vec![], vec![], RewardKind::Bernoulli).unwrap_err();
        assert!(matches!(err, Error::NoArms));
    }

    #[test]
    fn rejects_threshold_above_capacity() {
        let err =
            ProblemInstance::new(1.0, vec![0.5], vec![1.5], RewardKind::Bernoulli).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }));
    }

    #[test]
    fn feasibility_slack() {
        let x = Allocation::new(vec![0.7, 0.7, 0.6]);
        assert!(x.check_feasible(3, 2.0).is_ok());
        let x = Allocation::new(vec![0.7, 0.7, 0.61]);
        assert!(matches!(
            x.check_feasible(3, 2.0),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn horizon_delta_preset() {
        let mut cfg = crate::harness::builtin_instance(1).unwrap();
        cfg.horizon = 10_000;
        cfg.delta_alpha = Some(0.5);
        let expected = (-(10_000f64).ln().sqrt()).exp();
        assert!((cfg.effective_delta() - expected).abs() < 1e-15);
    }
}
