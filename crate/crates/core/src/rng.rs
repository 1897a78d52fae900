//! Seeded random streams.
//!
//! Every run draws from ChaCha8 (`rand_chacha`). A run seed is expanded with
//! `SeedableRng::seed_from_u64` and each purpose gets its own ChaCha stream
//! id. Reward draws do not depend on how many samples a policy consumes.
//! Repeat `r` of an experiment with base seed `s`
//! uses run seed `s ^ r`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose tag, used as the ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Rewards = 1,
    Posterior = 2,
    Binarize = 3,
    Baseline = 4,
}

pub fn stream(seed: u64, purpose: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

pub fn repeat_seed(base_seed: u64, repeat_index: u32) -> u64 {
    base_seed ^ u64::from(repeat_index)
}
