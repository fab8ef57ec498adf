//! Seed derivation.
//!
//! Every random stream is a ChaCha8 generator seeded from a base seed mixed
//! with a label path, so two components never share a stream and adding
//! parallelism cannot change which numbers a component sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `label` into `base`. Stable across platforms and releases.
pub fn derive(base: u64, label: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    splitmix64(base ^ splitmix64(h))
}

/// Mixes a sequence of labels, in order.
pub fn derive_path(base: u64, labels: &[&str]) -> u64 {
    labels.iter().fold(base, |acc, l| derive(acc, l))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
