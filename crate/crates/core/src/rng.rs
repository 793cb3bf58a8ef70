//! Deterministic seed derivation.
//!
//! Every stochastic component derives its own stream from the run seed plus
//! a purpose salt plus the entity ids involved (request id, model id). This
//! keeps simulation results independent of evaluation order and thread
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose salts for the independent random streams of a run.
pub mod salt {
    pub const WORKLOAD: u64 = 0x01;
    pub const OUTCOME: u64 = 0x02;
    pub const LATENCY: u64 = 0x03;
    pub const ENERGY: u64 = 0x04;
    pub const REPLICATE: u64 = 0x05;
    pub const RAW_IMAGE: u64 = 0x06;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable FNV-1a hash of a string (model ids enter seed derivation by name).
pub fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Mix a sequence of components into a single 64-bit seed.
pub fn mix(parts: &[u64]) -> u64 {
    let mut acc: u64 = 0x6a09_e667_f3bc_c909;
    for p in parts {
        acc = splitmix64(acc ^ splitmix64(*p));
    }
    acc
}

/// ChaCha8 stream keyed by the mixed components.
pub fn stream(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(parts))
}
