//! Seed derivation.
//!
//! Every random stream in the crate is keyed by a 64-bit seed derived from a
//! base seed and a tuple of counters, so adding trials or reordering work never
//! perturbs an existing stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `base` and an ordered list of counters.
pub fn derive_seed(base: u64, counters: &[u64]) -> u64 {
    counters
        .iter()
        .fold(mix64(base), |acc, &c| mix64(acc ^ mix64(c)))
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeds for the independent random stages of one pipeline run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSeeds {
    /// Latent-position randomness (degree factors, i.i.d. draws).
    pub model: u64,
    /// Edge sampling.
    pub graph: u64,
    /// k-means++ restarts.
    pub cluster: u64,
}

impl StageSeeds {
    pub fn new(seed: u64) -> Self {
        StageSeeds {
            model: derive_seed(seed, &[1]),
            graph: derive_seed(seed, &[2]),
            cluster: derive_seed(seed, &[3]),
        }
    }
}
