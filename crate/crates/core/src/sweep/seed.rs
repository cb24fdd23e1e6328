//! Per-stream seed derivation.
//!
//! Every random stream of a session is a ChaCha8 generator seeded (via
//! `SeedableRng::seed_from_u64`) with
//!
//! ```text
//! derive_seed(seed, index) = splitmix64(seed ^ index * 0x9E3779B97F4A7C15)
//! ```
//!
//! using wrapping 64-bit arithmetic and the standard SplitMix64 output
//! function. Sweep angle `k` uses `index = k`; the transmitter and the
//! constellation capture use the reserved indices below.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream index of the transmitter (bits, port draws, artificial noise).
pub const TX_STREAM: u64 = u64::MAX;
/// Stream index of the receiver noise in constellation captures.
pub const CAPTURE_STREAM: u64 = u64::MAX - 1;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ index.wrapping_mul(GOLDEN_GAMMA))
}

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index))
}
