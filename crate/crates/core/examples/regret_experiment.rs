//! A full experiment cell: repeats, confidence band, log fit and CSV output.

use onum::harness::output::{csv_string, write_outputs};
use onum::harness::{builtin_instance, fit_log_growth, run_experiment};

fn main() -> onum::Result<()> {
    let mut cfg = builtin_instance(1)?;
    cfg.repeats = 20;
    let trace = run_experiment(&cfg)?;
    for t in [100, 1_000, 10_000] {
        let i = t as usize - 1;
        println!(
            "t = {t:>6}: regret {:>8.1}  [{:.1}, {:.1}]",
            trace.mean_regret[i], trace.ci_low[i], trace.ci_high[i]
        );
    }
    let fit = fit_log_growth(&trace, 0.1)?;
    println!(
        "regret ~ {:.1} + {:.1} ln t  (R^2 = {:.4})",
        fit.intercept, fit.slope, fit.r_squared
    );

    let csv = csv_string(&trace);
    println!("{}", csv.lines().take(3).collect::<Vec<_>>().join("\n"));

    let dir = std::env::temp_dir().join("onum-example");
    let path = write_outputs(&dir, &cfg, "base", &trace, "example", &[])?;
    println!("wrote {}", path.display());
    Ok(())
}
