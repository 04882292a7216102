//! Deterministic seed derivation so that parallel or repeated runs with the
//! same master seed produce identical streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche, stable across platforms.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and a stream index.
pub fn derive(master: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(master).wrapping_add(splitmix64(stream.wrapping_add(1))))
}

/// Derive a child seed from a master seed and two stream indices.
pub fn derive2(master: u64, a: u64, b: u64) -> u64 {
    derive(derive(master, a), b)
}

/// Seeded RNG used throughout the crate (stable stream across versions).
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
