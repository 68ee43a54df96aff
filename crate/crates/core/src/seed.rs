//! Seed derivation for reproducible Monte-Carlo runs.
//!
//! Seeds are combined with the SplitMix64 finalizer, so `mix(a, b)` is a
//! fixed, platform-independent function of its inputs.

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// Seed for Monte-Carlo sample `sample` of benchmark case `case`.
pub fn sample_seed(master: u64, case: u64, sample: u64) -> u64 {
    mix(mix(master, case), sample)
}
