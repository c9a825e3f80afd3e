//! Seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator keyed by
//! `derive_seed(root, labels)`, where `labels` names the consumer (a domain
//! constant followed by indices such as batch and sample number). Streams are
//! therefore independent of thread scheduling and reproducible across
//! platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub mod domain {
    pub const WALK_BATCH: u64 = 0x5741_4c4b;
    pub const MODEL_INIT: u64 = 0x494e_4954;
    pub const SEARCH: u64 = 0x5345_4152;
    pub const BENCH_INSTANCES: u64 = 0x494e_5354;
    pub const BENCH_METHODS: u64 = 0x4d45_5448;
    pub const DATASET: u64 = 0x4441_5441;
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(root: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(mix64(root), |acc, &l| mix64(acc ^ mix64(l)))
}

pub fn stream(root: u64, labels: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, labels))
}
