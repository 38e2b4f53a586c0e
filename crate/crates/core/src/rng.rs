//! Deterministic randomness. Every stochastic operation takes an explicit
//! [`RandomSource`] so that transcripts are reproducible from a seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RandomSource = ChaCha8Rng;

pub fn seeded(seed: u64) -> RandomSource {
    ChaCha8Rng::seed_from_u64(seed)
}
