//! The one source of randomness in the crate.
//!
//! Generator `splitmix64-v1`:
//!
//! - state: one 64-bit word, initialized to the user seed;
//! - step: `state += 0x9E3779B97F4A7C15`, then output
//!   `z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//!   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`
//!   (wrapping arithmetic), i.e. Vigna's SplitMix64;
//! - bounded draw in `0..k`: `(next_u64() as u128 * k as u128) >> 64`
//!   (multiply-high, one draw per value, no rejection).
//!
//! Random seed trees draw the parent of vertex `k` as `1 + below(k − 1)` for
//! `k = 2..=n` in order, so a `(seed, n)` pair names the same tree in any
//! implementation that follows these three rules.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

pub const GENERATOR_NAME: &str = "splitmix64-v1";

#[derive(Debug, Clone)]
pub struct SeedRng(SplitMix64);

impl SeedRng {
    pub fn new(seed: u64) -> Self {
        SeedRng(SplitMix64::from_seed(seed.to_le_bytes()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform-ish value in `0..k` by multiply-high; `k` must be positive.
    pub fn below(&mut self, k: u64) -> u64 {
        debug_assert!(k > 0);
        ((self.next_u64() as u128 * k as u128) >> 64) as u64
    }

    /// Value in `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo) as u64 + 1;
        lo + self.below(span) as i64
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
