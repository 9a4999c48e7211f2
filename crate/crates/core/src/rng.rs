//! Deterministic random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream addressed by a
//! `(seed, stream)` pair. Seeds for nested work items (sweep point, trial,
//! Monte Carlo chunk) are derived by mixing, so results never depend on the
//! order in which a worker pool schedules the items.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers used inside one derived seed.
pub mod streams {
    pub const SIGNAL: u64 = 0;
    pub const MATRIX: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const BOOTSTRAP: u64 = 3;
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a path of indices.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(base), |acc, &k| {
        mix64(acc ^ mix64(k.wrapping_add(0x632B_E59B_D9B4_E019)))
    })
}

/// Opens stream `stream` of the generator keyed by `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
