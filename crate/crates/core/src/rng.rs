//! Seeding and random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded with a
//! 64-bit value. Sweep seeds are derived from the master seed by folding the
//! cell coordinates through the SplitMix64 finalizer, so any work unit can
//! reconstruct its streams without touching its neighbours.
//!
//! Standard normal variates use the ziggurat sampler of `rand_distr`
//! (`StandardNormal`). Both algorithms are fixed by the pinned crate versions
//! in `Cargo.lock`, which makes outputs identical across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Distinct stream tags so that SC generation, noise, tie-breaking and null
/// rewiring never share a stream for the same coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Structure = 0x5343_0001,
    Noise = 0x4e4f_0002,
    TieBreak = 0x5449_0003,
    Null = 0x4e55_0004,
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold a sequence of words into a seed, avalanching after each word.
pub fn mix_seed(master: u64, words: &[u64]) -> u64 {
    words.iter().fold(splitmix64(master), |acc, &w| {
        splitmix64(acc ^ splitmix64(w))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference SplitMix64 generator seeded with 0.
        let mut state = 0u64;
        let mut next = || {
            let out = splitmix64(state);
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            out
        };
        assert_eq!(next(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(next(), 0x6e78_9e6a_a1b9_65f4);
    }

    #[test]
    fn mix_is_order_sensitive() {
        assert_ne!(mix_seed(1, &[2, 3]), mix_seed(1, &[3, 2]));
        assert_ne!(mix_seed(1, &[2]), mix_seed(2, &[2]));
        assert_eq!(mix_seed(9, &[4, 5, 6]), mix_seed(9, &[4, 5, 6]));
    }

    #[test]
    fn rng_streams_are_reproducible() {
        let a: Vec<u64> = (0..8)
            .map(|_| 0)
            .scan(rng_from_seed(7), |r, _: u64| Some(r.random()))
            .collect();
        let b: Vec<u64> = (0..8)
            .map(|_| 0)
            .scan(rng_from_seed(7), |r, _: u64| Some(r.random()))
            .collect();
        assert_eq!(a, b);
    }
}
