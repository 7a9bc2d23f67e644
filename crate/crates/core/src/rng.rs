//! Counter-based random streams.
//!
//! Every random decision is drawn from a stream keyed by `(seed, a, b)`, so a
//! particle's draws depend only on its index and step, never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used to keep the key space of different consumers disjoint.
pub mod tag {
    pub const RESAMPLE: u64 = u64::MAX;
    pub const SIMULATE: u64 = u64::MAX - 1;
    pub const CHAIN: u64 = u64::MAX - 2;
    pub const ESTIMATE: u64 = u64::MAX - 3;
    pub const COMBO: u64 = u64::MAX - 4;
    pub const REJECTION: u64 = u64::MAX - 5;
    pub const REPETITION: u64 = u64::MAX - 6;
}

pub type StreamRng = ChaCha8Rng;

/// Independent generator for the coordinate `(a, b)` under `seed`.
pub fn stream(seed: u64, a: u64, b: u64) -> StreamRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&a.to_le_bytes());
    key[16..24].copy_from_slice(&b.to_le_bytes());
    key[24..].copy_from_slice(b"dupnet\x00\x01");
    ChaCha8Rng::from_seed(key)
}

/// Derives a child seed for the coordinate `(a, b)`.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    use rand::RngCore;
    stream(seed, a, b).next_u64()
}
