//! Splittable seeding: one global 64-bit seed expands into independent
//! per-trial and per-component streams by a counter-based SplitMix64 mix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Human-readable description of the derivation, recorded in run manifests.
pub const SEED_SCHEME: &str = "splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15), ChaCha8 per stream";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of substream `stream` of `seed`.
pub fn derive(seed: u64, stream: u64) -> u64 {
    splitmix64(seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Seed of trial `index` under the global seed.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    derive(seed, index as u64)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
