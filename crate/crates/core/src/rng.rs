//! Seeded random sources.
//!
//! Every stochastic routine takes an explicit [`SeededRng`]; nothing reads a
//! global generator. Child streams are split from a master seed by ChaCha
//! stream id, so adding blocks never perturbs the stream of an earlier block.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Counter-based split: same key as `from_seed(master)`, stream `index + 1`.
pub fn split(master: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Derives a 64-bit child seed; used where a seed must be recorded in a log.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    // splitmix64 over the path
    let mut z = master;
    for &p in path {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}
