//! Runs policies against the simulated network and aggregates their regret.

mod instances;
pub mod output;
pub mod stats;

use std::fmt;

use rayon::prelude::*;

pub use instances::{
    builtin_instance, sweep_configs, sweep_presets, with_reward, SweepParam, SweepPreset,
    UNIFORM_HALFWIDTH,
};
pub use stats::{aggregate, fit_log_growth, AggregateTrace, LogFit};

use crate::baselines::{baseline_policy, BaselineKind};
use crate::domain::{Algorithm, ExperimentConfig, ProblemInstance, RegretTrace};
use crate::environment::{arms_with_zero_support, served_value, Environment};
use crate::error::{Error, Result};
use crate::onum_dt::DifferentThresholdPolicy;
use crate::onum_st::{RewardMode, SameThresholdPolicy};
use crate::oracle::{
    allocation_equivalent_same, lower_bound_constant, max_feasible_cardinality, max_gap,
    min_optimal_cardinality, search_depth_dt, solve_knapsack, w_delta_dt, w_delta_st,
};
use crate::policy::Policy;
use crate::rng::repeat_seed;

pub fn reward_mode(instance: &ProblemInstance) -> RewardMode {
    if instance.reward_kind.is_continuous() {
        RewardMode::Continuous
    } else {
        RewardMode::Binary
    }
}

/// Builds the policy named by `config.algorithm`, seeded with `seed`.
pub fn build_policy(config: &ExperimentConfig, seed: u64) -> Result<Box<dyn Policy>> {
    let inst = &config.instance;
    let k = inst.num_arms();
    let c = inst.capacity;
    let mode = reward_mode(inst);
    let delta = config.effective_delta();
    Ok(match config.algorithm {
        Algorithm::OnumSt => Box::new(SameThresholdPolicy::new(
            k,
            c,
            delta,
            config.epsilon,
            seed,
            mode,
        )?),
        Algorithm::OnumDt => Box::new(DifferentThresholdPolicy::new(
            k,
            c,
            delta,
            config.epsilon,
            config.gamma,
            seed,
            mode,
        )?),
        Algorithm::MpTsKnown => {
            let theta_s = inst.same_threshold().ok_or_else(|| {
                Error::InvalidParameter("mp-ts-known needs every arm to share one threshold".into())
            })?;
            let eq = allocation_equivalent_same(theta_s, c, k)?;
            baseline_policy(BaselineKind::MpTsKnown(eq.theta_hat), k, c, seed, mode)?
        }
        Algorithm::CtsKnown => baseline_policy(
            BaselineKind::CtsKnown(inst.thresholds.clone()),
            k,
            c,
            seed,
            mode,
        )?,
        Algorithm::RandomBaseline => baseline_policy(
            BaselineKind::RandomFeasible(inst.thresholds.clone()),
            k,
            c,
            seed,
            mode,
        )?,
    })
}

fn at_round(round: u64) -> impl FnOnce(Error) -> Error {
    move |e| Error::AtRound {
        round,
        source: Box::new(e),
    }
}

/// Plays `policy` for `horizon` rounds and records its cumulative pseudo-regret.
///
/// Every allocation is checked against the capacity before the environment
/// sees it. `inspect` is called after each update with the round number.
pub fn run_policy<P, F>(
    instance: &ProblemInstance,
    policy: &mut P,
    horizon: u64,
    seed: u64,
    mut inspect: F,
) -> Result<RegretTrace>
where
    P: Policy + ?Sized,
    F: FnMut(u64, &P),
{
    if policy.num_arms() != instance.num_arms() {
        return Err(Error::DimensionMismatch {
            what: "policy arms",
            expected: instance.num_arms(),
            got: policy.num_arms(),
        });
    }
    let mu = &instance.mean_rewards;
    let theta = &instance.thresholds;
    let optimum = solve_knapsack(mu, theta, instance.capacity)?.total_value;
    let mut env = Environment::new(instance.clone(), seed);
    let mut cumulative = Vec::with_capacity(horizon as usize);
    let mut regret = 0.0;
    for t in 1..=horizon {
        let x = policy.select();
        x.check_feasible(instance.num_arms(), instance.capacity)
            .map_err(at_round(t))?;
        let feedback = env.step(&x).map_err(at_round(t))?;
        regret += optimum - served_value(mu, theta, x.amounts());
        cumulative.push(regret);
        policy.update(&feedback).map_err(at_round(t))?;
        inspect(t, policy);
    }
    Ok(RegretTrace {
        cumulative,
        convergence_round: policy.convergence_round(),
    })
}

/// One repeat of a config, with seed `base_seed ^ repeat`.
pub fn run_single(config: &ExperimentConfig, repeat: u32) -> Result<RegretTrace> {
    let seed = repeat_seed(config.base_seed, repeat);
    let mut policy = build_policy(config, seed)?;
    run_policy(
        &config.instance,
        policy.as_mut(),
        config.horizon,
        seed,
        |_, _| {},
    )
}

/// All repeats in parallel, aggregated in repeat order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<AggregateTrace> {
    config.validate()?;
    let traces = (0..config.repeats)
        .into_par_iter()
        .map(|r| run_single(config, r))
        .collect::<Result<Vec<_>>>()?;
    aggregate(&traces)
}

/// Conditions under which a run is legal but its guarantees do not hold.
pub fn config_warnings(config: &ExperimentConfig) -> Result<Vec<String>> {
    let inst = &config.instance;
    let mut warnings = Vec::new();
    let zero_support = arms_with_zero_support(inst);
    if !zero_support.is_empty() {
        warnings.push(format!(
            "arms {zero_support:?} can draw a zero reward while served; the single-zero rule may reject a sufficient allocation"
        ));
    }
    if config.algorithm == Algorithm::OnumDt {
        let sol = solve_knapsack(&inst.mean_rewards, &inst.thresholds, inst.capacity)?;
        if sol.gamma_star < config.gamma {
            warnings.push(format!(
                "gamma = {} exceeds the optimality slack {}; estimates above the true thresholds may lose the optimum",
                config.gamma, sol.gamma_star
            ));
        }
    }
    Ok(warnings)
}

/// Offline diagnostics of an instance under a config's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub optimal_arms: Vec<usize>,
    pub optimal_allocation: Vec<f64>,
    pub optimal_value: f64,
    pub leftover: f64,
    pub gamma_star: f64,
    pub max_gap: f64,
    pub min_optimal_cardinality: usize,
    pub max_feasible_cardinality: usize,
    /// Served-arm count and `C/M` when every arm shares one threshold.
    pub equivalent_same: Option<(usize, f64)>,
    pub lower_bound_constant: Option<f64>,
    pub w_delta_st: Option<u64>,
    pub w_delta_dt: Option<u64>,
    pub search_depth_dt: Option<u32>,
}

pub fn oracle_report(config: &ExperimentConfig) -> Result<OracleReport> {
    let inst = &config.instance;
    let (mu, theta, c, k) = (
        &inst.mean_rewards,
        &inst.thresholds,
        inst.capacity,
        inst.num_arms(),
    );
    let sol = solve_knapsack(mu, theta, c)?;
    let equivalent = inst
        .same_threshold()
        .map(|t| allocation_equivalent_same(t, c, k))
        .transpose()?;
    let delta = config.effective_delta();
    Ok(OracleReport {
        optimal_allocation: sol.allocation(theta).amounts().to_vec(),
        optimal_arms: sol.selected,
        optimal_value: sol.total_value,
        leftover: sol.leftover,
        gamma_star: sol.gamma_star,
        max_gap: max_gap(mu, theta, c)?,
        min_optimal_cardinality: min_optimal_cardinality(mu, theta, c)?,
        max_feasible_cardinality: max_feasible_cardinality(theta, c),
        lower_bound_constant: equivalent
            .as_ref()
            .and_then(|eq| lower_bound_constant(mu, eq.m_arms).ok()),
        equivalent_same: equivalent.map(|eq| (eq.m_arms, eq.theta_hat)),
        w_delta_st: w_delta_st(k, delta, config.epsilon).ok(),
        w_delta_dt: w_delta_dt(k, c, config.gamma, delta, config.epsilon).ok(),
        search_depth_dt: search_depth_dt(c, config.gamma).ok(),
    })
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn opt<T: fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "n/a".to_string(), T::to_string)
        }
        writeln!(f, "optimal arms       {:?}", self.optimal_arms)?;
        writeln!(f, "optimal allocation {:?}", self.optimal_allocation)?;
        writeln!(f, "optimal value      {}", self.optimal_value)?;
        writeln!(f, "leftover           {}", self.leftover)?;
        writeln!(f, "gamma*             {}", self.gamma_star)?;
        writeln!(f, "max gap            {}", self.max_gap)?;
        writeln!(f, "k*                 {}", self.min_optimal_cardinality)?;
        writeln!(f, "K_max              {}", self.max_feasible_cardinality)?;
        match self.equivalent_same {
            Some((m, theta_hat)) => writeln!(f, "equivalent theta   {theta_hat} (M = {m})")?,
            None => writeln!(f, "equivalent theta   n/a")?,
        }
        writeln!(f, "lower-bound const  {}", opt(&self.lower_bound_constant))?;
        writeln!(f, "W_delta (same)     {}", opt(&self.w_delta_st))?;
        writeln!(f, "W_delta (diff)     {}", opt(&self.w_delta_dt))?;
        write!(f, "search depth       {}", opt(&self.search_depth_dt))
    }
}
