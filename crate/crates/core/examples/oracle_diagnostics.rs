//! Offline quantities of every built-in instance: optimum, slack, gaps,
//! search lengths and the lower-bound constant.

use onum::harness::{builtin_instance, config_warnings, oracle_report};
use onum::oracle::{allocation_equivalent_same, kl_bernoulli};

fn main() -> onum::Result<()> {
    for id in 1..=3 {
        let cfg = builtin_instance(id)?;
        println!("== {} ==\n{}", cfg.name, oracle_report(&cfg)?);
        for w in config_warnings(&cfg)? {
            println!("warning: {w}");
        }
    }
    let eq = allocation_equivalent_same(0.7, 20.0, 50)?;
    println!(
        "\ntheta_s = 0.7 behaves like {} = 20/{}",
        eq.theta_hat, eq.m_arms
    );
    println!("d(0.47, 0.48) = {:.6}", kl_bernoulli(0.47, 0.48)?);
    Ok(())
}
