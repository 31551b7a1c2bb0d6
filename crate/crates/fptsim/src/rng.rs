//! Seedable, splittable random streams.
//!
//! Every sampler in the crate draws from an [`RngStream`]. A stream is a
//! ChaCha8 generator keyed by a 64-bit value; children produced by
//! [`RngStream::split`] get keys derived by SplitMix64 mixing, so a tree of
//! streams is a pure function of the root seed.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_POW_M53: f64 = 1.0 / 9_007_199_254_740_992.0;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct RngStream {
    key: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            key: seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent child stream number `index`. Does not advance `self`.
    pub fn split(&self, index: u64) -> RngStream {
        let key = splitmix64(self.key ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)));
        RngStream::new(key)
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    /// Exp(1) by inversion.
    #[inline]
    pub fn exp1(&mut self) -> f64 {
        -(-self.uniform()).ln_1p()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
