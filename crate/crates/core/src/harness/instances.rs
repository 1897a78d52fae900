//! Built-in experiment cells and parameter sweeps.

use crate::domain::{Algorithm, ExperimentConfig, ProblemInstance, RewardKind};
use crate::error::{Error, Result};

/// Half-width of the uniform reward distribution used in the experiments.
pub const UNIFORM_HALFWIDTH: f64 = 0.1;

/// The three reference instances.
///
/// 1. 50 arms, capacity 20, shared threshold 0.7, `μ_i = 0.25 + (i-1)/100`.
/// 2. 5 arms, capacity 2, different thresholds; its optimum uses all the capacity.
/// 3. 10 arms, capacity 3, different thresholds.
pub fn builtin_instance(id: u32) -> Result<ExperimentConfig> {
    let (name, algorithm, capacity, mean_rewards, thresholds) = match id {
        1 => (
            "instance1",
            Algorithm::OnumSt,
            20.0,
            (0..50).map(|i| 0.25 + f64::from(i) / 100.0).collect(),
            vec![0.7; 50],
        ),
        2 => (
            "instance2",
            Algorithm::OnumDt,
            2.0,
            vec![0.9, 0.89, 0.87, 0.6, 0.3],
            vec![0.7, 0.7, 0.7, 0.6, 0.35],
        ),
        3 => (
            "instance3",
            Algorithm::OnumDt,
            3.0,
            vec![0.9, 0.8, 0.42, 0.6, 0.5, 0.2, 0.11, 0.7, 0.3, 0.98],
            vec![0.6, 0.55, 0.3, 0.46, 0.34, 0.2, 0.07, 0.3, 0.25, 0.8],
        ),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unknown built-in instance {id} (expected 1, 2 or 3)"
            )))
        }
    };
    Ok(ExperimentConfig {
        name: name.to_string(),
        algorithm,
        horizon: 10_000,
        repeats: 50,
        base_seed: 0,
        delta: 0.1,
        epsilon: 0.1,
        gamma: 1e-3,
        delta_alpha: None,
        instance: ProblemInstance::new(capacity, mean_rewards, thresholds, RewardKind::Bernoulli)?,
    })
}

/// Which instance parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Capacity,
    /// Sets every arm's threshold to the value.
    SameThreshold,
}

impl SweepParam {
    pub fn tag(&self) -> &'static str {
        match self {
            SweepParam::Capacity => "C",
            SweepParam::SameThreshold => "theta",
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "capacity" | "C" | "c" => Ok(SweepParam::Capacity),
            "theta-s" | "theta" | "threshold" => Ok(SweepParam::SameThreshold),
            _ => Err(Error::InvalidParameter(format!(
                "unknown sweep parameter `{s}` (expected capacity or theta-s)"
            ))),
        }
    }
}

/// One cell per value: `(variant label, config)`.
pub fn sweep_configs(
    base: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<Vec<(String, ExperimentConfig)>> {
    values
        .iter()
        .map(|&v| {
            let mut cfg = base.clone();
            match param {
                SweepParam::Capacity => cfg.instance.capacity = v,
                SweepParam::SameThreshold => cfg.instance.thresholds.fill(v),
            }
            cfg.validate()?;
            Ok((format!("{}{}", param.tag(), v), cfg))
        })
        .collect()
}

/// A named parameter sweep.
#[derive(Debug, Clone)]
pub struct SweepPreset {
    pub name: String,
    pub base: ExperimentConfig,
    pub param: SweepParam,
    pub values: Vec<f64>,
}

pub fn with_reward(mut cfg: ExperimentConfig, reward_kind: RewardKind) -> ExperimentConfig {
    cfg.instance.reward_kind = reward_kind;
    cfg
}

/// Preset sweeps: capacity and threshold sweeps on
/// instance 1, capacity sweeps on instances 2 and 3, each with Bernoulli
/// and uniform rewards. Uniform runs on instances 2 and 3 use 200 repeats.
pub fn sweep_presets() -> Vec<SweepPreset> {
    let uniform = RewardKind::Uniform {
        halfwidth: UNIFORM_HALFWIDTH,
    };
    let mut presets = Vec::new();
    for (reward, suffix) in [(RewardKind::Bernoulli, "bernoulli"), (uniform, "uniform")] {
        let one = with_reward(builtin_instance(1).expect("built-in"), reward);
        let mut two = with_reward(builtin_instance(2).expect("built-in"), reward);
        let mut three = with_reward(builtin_instance(3).expect("built-in"), reward);
        if reward.is_continuous() {
            two.repeats = 200;
            three.repeats = 200;
        }
        presets.push(SweepPreset {
            name: format!("capacity-instance1-{suffix}"),
            base: one.clone(),
            param: SweepParam::Capacity,
            values: vec![10.0, 20.0, 30.0],
        });
        presets.push(SweepPreset {
            name: format!("threshold-instance1-{suffix}"),
            base: one,
            param: SweepParam::SameThreshold,
            values: vec![0.5, 0.7, 0.9],
        });
        presets.push(SweepPreset {
            name: format!("capacity-instance2-{suffix}"),
            base: two,
            param: SweepParam::Capacity,
            values: vec![2.0, 2.5, 3.0],
        });
        presets.push(SweepPreset {
            name: format!("capacity-instance3-{suffix}"),
            base: three,
            param: SweepParam::Capacity,
            values: vec![3.0, 3.5, 4.0],
        });
    }
    presets
}
