//! The select → step → update contract every learner implements.

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::domain::{Allocation, BetaPosterior, RoundFeedback};
use crate::error::{Error, Result};

/// A learner that only sees its own allocations and the censored feedback.
pub trait Policy: Send {
    fn num_arms(&self) -> usize;

    /// Chooses the allocation for the next round.
    fn select(&mut self) -> Allocation;

    /// Consumes the feedback for the allocation returned by the last `select`.
    fn update(&mut self, feedback: &RoundFeedback) -> Result<()>;

    /// Round at which the threshold search finished, if it has.
    fn convergence_round(&self) -> Option<u64> {
        None
    }
}

/// Tracks which round a policy has selected for and is waiting on.
#[derive(Debug, Clone, Default)]
pub(crate) struct RoundClock {
    round: u64,
    pending: bool,
}

impl RoundClock {
    pub(crate) fn start(&mut self) -> u64 {
        self.round += 1;
        self.pending = true;
        self.round
    }

    pub(crate) fn finish(&mut self, feedback: &RoundFeedback, num_arms: usize) -> Result<()> {
        if !self.pending || feedback.round != self.round {
            return Err(Error::RoundMismatch {
                expected: self.round,
                got: feedback.round,
            });
        }
        if feedback.observed.len() != num_arms {
            return Err(Error::DimensionMismatch {
                what: "feedback",
                expected: num_arms,
                got: feedback.observed.len(),
            });
        }
        self.pending = false;
        Ok(())
    }

    pub(crate) fn round(&self) -> u64 {
        self.round
    }
}

/// One Thompson sample per arm from its Beta posterior.
pub(crate) fn sample_posterior<R: Rng + ?Sized>(
    posterior: &BetaPosterior,
    rng: &mut R,
) -> Vec<f64> {
    posterior
        .successes
        .iter()
        .zip(&posterior.failures)
        .map(|(&s, &f)| {
            Beta::new(s, f)
                .expect("posterior counts stay >= 1")
                .sample(rng)
        })
        .collect()
}

/// Arm indices ordered by decreasing sample, ties by lower index.
pub(crate) fn rank_by_sample(samples: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        samples[b]
            .partial_cmp(&samples[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}
