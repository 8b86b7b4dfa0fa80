//! Counter-based seed derivation.
//!
//! Every random stream in the crate is keyed by `(seed, stream, index)`, so a
//! trial or instance draws the same numbers no matter which thread runs it or
//! in which order. The derivation is two rounds of SplitMix64 over the packed
//! key; the result seeds a ChaCha8 generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags. Distinct tags keep unrelated consumers of one seed apart.
pub mod stream {
    pub const GAP_TRIAL: u64 = 0x01;
    pub const DIRECTIONS: u64 = 0x02;
    pub const LEWIS_SAMPLE: u64 = 0x03;
    pub const ANTICONC: u64 = 0x04;
    pub const SPLIT_STRESS: u64 = 0x05;
    pub const WALK: u64 = 0x06;
    pub const OPT_STEP: u64 = 0x07;
    pub const INSTANCE: u64 = 0x08;
    pub const MEAN_WIDTH: u64 = 0x09;
    pub const POLAR: u64 = 0x0a;
    pub const HULL: u64 = 0x0b;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let a = splitmix64(seed ^ stream.rotate_left(48));
    splitmix64(a ^ splitmix64(index))
}

pub fn rng_for(seed: u64, stream: u64, index: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, stream, index))
}
