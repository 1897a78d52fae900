//! Known-threshold and random baselines next to the learners on instance 3.

use onum::harness::{builtin_instance, run_experiment};
use onum::Algorithm;

fn main() -> onum::Result<()> {
    let mut cfg = builtin_instance(3)?;
    cfg.horizon = 5_000;
    cfg.repeats = 10;
    for algorithm in [
        Algorithm::OnumDt,
        Algorithm::CtsKnown,
        Algorithm::RandomBaseline,
    ] {
        cfg.algorithm = algorithm;
        let trace = run_experiment(&cfg)?;
        println!(
            "{:<16} regret {:>9.1}",
            algorithm.name(),
            trace.final_mean()
        );
    }

    let mut one = builtin_instance(1)?;
    one.horizon = 5_000;
    one.repeats = 10;
    for algorithm in [Algorithm::OnumSt, Algorithm::MpTsKnown] {
        one.algorithm = algorithm;
        println!(
            "{:<16} regret {:>9.1}",
            algorithm.name(),
            run_experiment(&one)?.final_mean()
        );
    }
    Ok(())
}
