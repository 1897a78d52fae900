//! ONUM-ST on instance 1: watch the binary search over `C/K, …, C` settle.

use onum::harness::{builtin_instance, run_policy};
use onum::onum_st::{RewardMode, SameThresholdPolicy};

fn main() -> onum::Result<()> {
    let cfg = builtin_instance(1)?;
    let inst = &cfg.instance;
    let mut policy = SameThresholdPolicy::new(
        inst.num_arms(),
        inst.capacity,
        0.1,
        0.1,
        7,
        RewardMode::Binary,
    )?;
    println!("W_delta = {}", policy.w_delta());

    let mut last = usize::MAX;
    let trace = run_policy(inst, &mut policy, 2_000, 7, |t, p| {
        let s = p.search();
        if s.current != last {
            println!(
                "round {t:>4}: bracket ({}, {}] probing {:.4}",
                s.lower,
                s.upper,
                p.theta_hat()
            );
            last = s.current;
        }
    })?;
    println!(
        "converged at {:?} with theta_hat = {} (20/28 = {})",
        trace.convergence_round,
        policy.theta_hat(),
        20.0 / 28.0
    );
    println!("regret after 2000 rounds: {:.1}", trace.final_regret());
    Ok(())
}
