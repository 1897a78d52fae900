//! ONUM-DT on instance 3: per-arm bisection, then CTS on the estimates.

use onum::harness::{builtin_instance, run_policy};
use onum::onum_dt::DifferentThresholdPolicy;
use onum::onum_st::RewardMode;

fn main() -> onum::Result<()> {
    let cfg = builtin_instance(3)?;
    let inst = &cfg.instance;
    let mut policy = DifferentThresholdPolicy::new(
        inst.num_arms(),
        inst.capacity,
        cfg.delta,
        cfg.epsilon,
        cfg.gamma,
        11,
        RewardMode::Binary,
    )?;
    println!("W_delta = {}", policy.w_delta());

    let trace = run_policy(inst, &mut policy, 5_000, 11, |t, p| {
        if t % 250 == 0 && !p.converged() {
            let good = p.arms().iter().filter(|a| a.is_good).count();
            println!("round {t:>4}: {good}/{} arms settled", p.arms().len());
        }
    })?;
    println!("converged at {:?}", trace.convergence_round);
    for (i, (est, truth)) in policy.theta_hat().iter().zip(&inst.thresholds).enumerate() {
        println!("arm {i}: theta_hat {est:.5}  theta {truth}");
    }
    println!("regret after 5000 rounds: {:.1}", trace.final_regret());
    Ok(())
}
