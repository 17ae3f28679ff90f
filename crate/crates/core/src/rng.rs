//! Deterministic random streams.
//!
//! Every stream is a xoshiro256++ generator seeded through SplitMix64
//! (`SeedableRng::seed_from_u64`), so a given seed yields the same draws
//! on every platform. Trial and sub-stream seeds are derived with
//! [`mix_seed`].

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// SplitMix64 finaliser.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `(base, index)`.
///
/// `mix_seed(b, i) = splitmix64(splitmix64(b) ^ splitmix64(i ^ 0xD1B5_4A32_D192_ED03))`.
/// Changing either input changes the output, and extending a sweep with
/// more trials leaves the existing trial seeds untouched.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ splitmix64(index ^ 0xD1B5_4A32_D192_ED03))
}

/// A seeded random stream owned by a single trial.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    inner: Xoshiro256PlusPlus,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// An independent stream keyed by `label`, derived from this stream's seed.
    pub fn fork(&self, label: u64) -> Self {
        Self::new(mix_seed(self.seed, label))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform index in `[0, n)`. Panics if `n == 0`.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    /// Uniform integer in `[lo, hi]`.
    #[inline]
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        self.inner.gen_range(lo..=hi)
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A fair coin.
    #[inline]
    pub fn coin(&mut self) -> bool {
        self.inner.next_u64() >> 63 == 1
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}
