//! Deterministic, splittable randomness.
//!
//! All randomness in the crate flows from a single `u64` seed through
//! ChaCha8; independent substreams come from ChaCha's stream parameter, so
//! concurrent consumers never contend over one generator state.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SplitRng {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SplitRng {
    pub fn new(seed: u64) -> Self {
        SplitRng { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// An independent generator for substream `stream` of the same seed.
    pub fn split(&self, stream: u64) -> SplitRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream.wrapping_add(1));
        SplitRng { seed: self.seed, rng }
    }

    /// Uniform value in `0..bound` (`bound >= 1`).
    pub fn below(&mut self, bound: u32) -> u32 {
        debug_assert!(bound >= 1);
        self.rng.random_range(0..bound)
    }

    /// Uniform value in `lo..=hi`.
    pub fn range(&mut self, lo: u32, hi: u32) -> u32 {
        debug_assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random()
    }

    /// Fisher-Yates shuffle of `1..=n`.
    pub fn permutation(&mut self, n: u32) -> Vec<u32> {
        let mut perm: Vec<u32> = (1..=n).collect();
        for i in (1..perm.len()).rev() {
            let j = self.below(i as u32 + 1) as usize;
            perm.swap(i, j);
        }
        perm
    }
}
