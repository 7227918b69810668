//! Seeded random streams.
//!
//! Every stochastic operation takes an explicit generator. Experiments derive
//! one independent ChaCha8 stream per `(master seed, purpose label, index)`:
//! the 64-bit key is `splitmix64(seed ^ fnv1a64(label))` and the stream id is
//! the index, so trials can be evaluated in any order or on any thread and
//! still see the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// FNV-1a over the label bytes.
pub fn fnv1a64(label: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent stream for `(seed, label, index)`.
pub fn stream(seed: u64, label: &str, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ fnv1a64(label)));
    rng.set_stream(index);
    rng
}
