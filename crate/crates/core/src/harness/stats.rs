//! Aggregation across repeats and the log-growth fit.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::domain::RegretTrace;
use crate::error::{Error, Result};

/// Mean cumulative regret per round with a 95% confidence band.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateTrace {
    pub rounds: u64,
    pub mean_regret: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub n_repeats: usize,
    pub convergence_rounds: Vec<Option<u64>>,
}

impl AggregateTrace {
    pub fn final_mean(&self) -> f64 {
        self.mean_regret.last().copied().unwrap_or(0.0)
    }

    /// Mean cumulative regret after round `t` (1-based).
    pub fn mean_at(&self, t: u64) -> f64 {
        self.mean_regret[(t - 1) as usize]
    }

    pub fn converged_fraction(&self) -> f64 {
        let n = self.convergence_rounds.len().max(1) as f64;
        self.convergence_rounds
            .iter()
            .filter(|r| r.is_some())
            .count() as f64
            / n
    }
}

/// Two-sided 95% critical value: normal for 30 or more repeats, Student-t
/// with `n - 1` degrees of freedom below that.
pub fn critical_value(n: usize) -> f64 {
    if n >= 30 {
        1.96
    } else if n < 2 {
        0.0
    } else {
        StudentsT::new(0.0, 1.0, (n - 1) as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(0.975)
    }
}

/// Pointwise mean and `mean ± z·sd/√n` over equally long traces, reduced in
/// the order given.
pub fn aggregate(traces: &[RegretTrace]) -> Result<AggregateTrace> {
    let first = traces
        .first()
        .ok_or_else(|| Error::InvalidParameter("nothing to aggregate".into()))?;
    let len = first.cumulative.len();
    if let Some(bad) = traces.iter().find(|t| t.cumulative.len() != len) {
        return Err(Error::DimensionMismatch {
            what: "regret trace",
            expected: len,
            got: bad.cumulative.len(),
        });
    }
    let n = traces.len();
    let z = critical_value(n);
    let mut mean_regret = Vec::with_capacity(len);
    let mut ci_low = Vec::with_capacity(len);
    let mut ci_high = Vec::with_capacity(len);
    for t in 0..len {
        let mean = traces.iter().map(|tr| tr.cumulative[t]).sum::<f64>() / n as f64;
        let half = if n < 2 {
            0.0
        } else {
            let var = traces
                .iter()
                .map(|tr| (tr.cumulative[t] - mean).powi(2))
                .sum::<f64>()
                / (n - 1) as f64;
            z * (var / n as f64).sqrt()
        };
        mean_regret.push(mean);
        ci_low.push(mean - half);
        ci_high.push(mean + half);
    }
    Ok(AggregateTrace {
        rounds: len as u64,
        mean_regret,
        ci_low,
        ci_high,
        n_repeats: n,
        convergence_rounds: traces.iter().map(|t| t.convergence_round).collect(),
    })
}

/// Least-squares fit `regret ≈ intercept + slope · ln t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits the mean cumulative regret against `ln t` for `t ≥ burn_in_fraction · T`.
pub fn fit_log_growth(trace: &AggregateTrace, burn_in_fraction: f64) -> Result<LogFit> {
    fit_log_growth_values(&trace.mean_regret, burn_in_fraction)
}

/// [`fit_log_growth`] on a raw cumulative series (index 0 is round 1).
pub fn fit_log_growth_values(cumulative: &[f64], burn_in_fraction: f64) -> Result<LogFit> {
    let horizon = cumulative.len();
    if horizon < 100 {
        return Err(Error::InvalidParameter(format!(
            "log-growth fit needs at least 100 rounds, got {horizon}"
        )));
    }
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(Error::out_of_range(
            "burn_in_fraction",
            burn_in_fraction,
            "[0, 1)",
        ));
    }
    let start = ((burn_in_fraction * horizon as f64).ceil() as usize).max(1);
    let points: Vec<(f64, f64)> = (start..=horizon)
        .map(|t| ((t as f64).ln(), cumulative[t - 1]))
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if syy <= f64::EPSILON * mean_y.abs().max(1.0) * n || sxx == 0.0 {
        return Err(Error::Degenerate(
            "regret trace is constant over the fit window".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(LogFit {
        slope,
        intercept,
        r_squared: 1.0 - ss_res / syy,
    })
}
