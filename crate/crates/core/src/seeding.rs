//! Seeded random streams.
//!
//! Every consumer gets its own ChaCha8 stream so that instance generation and
//! fitting never share random draws, even when driven by the same seed.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GENERATOR_STREAM: u64 = 0;
const FIT_STREAM: u64 = 1;
const CASE_STREAM_BASE: u64 = 1 << 32;

pub fn generator_rng(seed: u64) -> ChaCha8Rng {
    stream(seed, GENERATOR_STREAM)
}

pub fn fit_rng(seed: u64) -> ChaCha8Rng {
    stream(seed, FIT_STREAM)
}

/// Seed of case `case` in a multi-case experiment, split off the base seed.
pub fn case_seed(base: u64, case: u64) -> u64 {
    stream(base, CASE_STREAM_BASE + case).next_u64()
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
