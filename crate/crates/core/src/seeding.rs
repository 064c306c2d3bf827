//! Stable seed derivation.
//!
//! Seeds are derived by hashing labels with FNV-1a and mixing with
//! SplitMix64, so they do not depend on the standard library's randomized
//! hasher and stay identical across builds and platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mix(seed: u64, value: u64) -> u64 {
    splitmix(seed ^ splitmix(value))
}

/// Seed of one trial cell.
pub fn trial_seed(master: u64, problem: &str, algorithm: &str, trial: usize) -> u64 {
    let s = mix(master, fnv1a(problem.as_bytes()));
    let s = mix(s, fnv1a(algorithm.as_bytes()));
    mix(s, trial as u64)
}

/// Seed of a labeled substream, e.g. `("noise", setting)`.
pub fn substream_seed(seed: u64, label: &str, index: u64) -> u64 {
    mix(mix(seed, fnv1a(label.as_bytes())), index)
}

pub fn substream(seed: u64, label: &str, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(substream_seed(seed, label, index))
}
