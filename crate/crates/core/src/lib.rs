//! Online network utility maximization with unknown threshold utilities.
//!
//! A learner splits a divisible resource of size `C` across `K` arms each
//! round. Arm `i` pays a random reward with mean `μ_i` only when it receives
//! at least its hidden threshold `θ_i`, and the learner sees nothing from
//! arms that fell short. The crate provides:
//!
//! * [`oracle`]: the exact knapsack oracle and the instance-level quantities
//!   built on it;
//! * [`environment`]: the simulated network and its censored feedback;
//! * [`onum_st`] and [`onum_dt`]: learners for a shared threshold and for
//!   per-arm thresholds;
//! * [`baselines`]: known-threshold and random references;
//! * [`harness`]: repeated runs, regret aggregation, sweeps and file output.
//!
//! ```
//! use onum::harness::{builtin_instance, run_experiment};
//!
//! let mut config = builtin_instance(2).unwrap();
//! config.horizon = 200;
//! config.repeats = 2;
//! let trace = run_experiment(&config).unwrap();
//! assert_eq!(trace.mean_regret.len(), 200);
//! ```

pub mod baselines;
pub mod domain;
pub mod environment;
pub mod error;
pub mod harness;
pub mod onum_dt;
pub mod onum_st;
pub mod oracle;
pub mod policy;
pub mod rng;

pub use domain::{
    Algorithm, Allocation, BetaPosterior, ExperimentConfig, ProblemInstance, RegretTrace,
    RewardKind, RoundFeedback,
};
pub use error::{Error, Result};
pub use onum_st::RewardMode;
pub use policy::Policy;
