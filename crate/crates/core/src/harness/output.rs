//! Flat-file outputs: the regret CSV with its metadata sidecar, plus config files.
//!
//! CSV layout, one row per round:
//!
//! ```text
//! round,mean_regret,ci_low,ci_high
//! 1,0.52,0.47,0.57
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so identical traces
//! always produce identical bytes. The sidecar is TOML with the config echo,
//! the base seed, the source revision and a convergence summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::domain::ExperimentConfig;
use crate::error::{Error, Result};
use crate::harness::stats::AggregateTrace;

pub const CSV_HEADER: &str = "round,mean_regret,ci_low,ci_high";

pub fn csv_string(trace: &AggregateTrace) -> String {
    let mut out = String::with_capacity(trace.mean_regret.len() * 48);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for t in 0..trace.mean_regret.len() {
        writeln!(
            out,
            "{},{},{},{}",
            t + 1,
            trace.mean_regret[t],
            trace.ci_low[t],
            trace.ci_high[t]
        )
        .expect("writing to a String");
    }
    out
}

/// Reads a CSV written by [`csv_string`] back into `(round, mean, low, high)` rows.
pub fn parse_csv(text: &str) -> Result<Vec<(u64, f64, f64, f64)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Config(format!(
                "expected header `{CSV_HEADER}`, found `{}`",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let bad = || Error::Config(format!("line {}: `{line}`", n + 2));
            let mut it = line.split(',');
            let mut next = || it.next().ok_or_else(bad);
            let round = next()?.parse().map_err(|_| bad())?;
            let mean = next()?.parse().map_err(|_| bad())?;
            let low = next()?.parse().map_err(|_| bad())?;
            let high = next()?.parse().map_err(|_| bad())?;
            Ok((round, mean, low, high))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
struct ConvergenceSummary {
    converged_runs: usize,
    total_runs: usize,
    /// Mean over converged runs; -1 when none converged.
    mean_round: f64,
    /// Per repeat; -1 when the search did not finish within the horizon.
    rounds: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
struct Sidecar<'a> {
    base_seed: u64,
    commit: &'a str,
    variant: &'a str,
    final_mean_regret: f64,
    warnings: &'a [String],
    convergence: ConvergenceSummary,
    config: &'a ExperimentConfig,
}

pub fn sidecar_string(
    config: &ExperimentConfig,
    variant: &str,
    trace: &AggregateTrace,
    commit: &str,
    warnings: &[String],
) -> Result<String> {
    let rounds: Vec<i64> = trace
        .convergence_rounds
        .iter()
        .map(|r| r.map_or(-1, |v| v as i64))
        .collect();
    let converged: Vec<f64> = trace
        .convergence_rounds
        .iter()
        .flatten()
        .map(|&r| r as f64)
        .collect();
    let mean_round = if converged.is_empty() {
        -1.0
    } else {
        converged.iter().sum::<f64>() / converged.len() as f64
    };
    let sidecar = Sidecar {
        base_seed: config.base_seed,
        commit,
        variant,
        final_mean_regret: trace.final_mean(),
        warnings,
        convergence: ConvergenceSummary {
            converged_runs: converged.len(),
            total_runs: trace.convergence_rounds.len(),
            mean_round,
            rounds,
        },
        config,
    };
    toml::to_string(&sidecar).map_err(|e| Error::Config(e.to_string()))
}

/// File stem shared by the CSV and its sidecar.
pub fn output_stem(config: &ExperimentConfig, variant: &str) -> String {
    let reward = if config.instance.reward_kind.is_continuous() {
        "uniform"
    } else {
        "bernoulli"
    };
    format!(
        "{}_{}_{}_{}",
        config.name,
        config.algorithm.name(),
        reward,
        variant
    )
}

/// Writes `<stem>.csv` and `<stem>.meta.toml` under `dir`; returns the CSV path.
pub fn write_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    variant: &str,
    trace: &AggregateTrace,
    commit: &str,
    warnings: &[String],
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let stem = output_stem(config, variant);
    let csv_path = dir.join(format!("{stem}.csv"));
    fs::write(&csv_path, csv_string(trace))?;
    fs::write(
        dir.join(format!("{stem}.meta.toml")),
        sidecar_string(config, variant, trace, commit, warnings)?,
    )?;
    Ok(csv_path)
}

pub fn config_to_toml(config: &ExperimentConfig) -> Result<String> {
    toml::to_string(config).map_err(|e| Error::Config(e.to_string()))
}

pub fn config_from_toml(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    config_from_toml(&fs::read_to_string(path)?)
}
