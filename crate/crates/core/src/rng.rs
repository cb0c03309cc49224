//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 keystream. The key is derived from a 64-bit seed
//! and the 64-bit ChaCha stream id selects one of 2^64 independent sequences
//! under that key, so `(seed, stream)` pairs address non-overlapping
//! sequences without any coordination between runs.
//!
//! Campaigns derive one stream per `(base seed, cell, run)` via
//! [`RandomStream::for_run`]. Inside a run, work that may be dispatched
//! concurrently is handed pre-split children from [`RandomStream::split`];
//! the children are drawn in a fixed order before dispatch, so the results do
//! not depend on scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

/// SplitMix64 finalizer, used to fold indices into a stream id.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream id used by [`RandomStream::for_run`].
pub fn run_stream_id(cell: u64, run: u64) -> u64 {
    mix64(mix64(cell) ^ run.rotate_left(32))
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// The stream for run `run` of campaign cell `cell`.
    pub fn for_run(base_seed: u64, cell: u64, run: u64) -> Self {
        Self::with_stream(base_seed, run_stream_id(cell, run))
    }

    /// Draws a child stream. The child is independent of the parent's
    /// subsequent output.
    pub fn split(&mut self) -> Self {
        let seed = self.inner.next_u64();
        let stream = self.inner.next_u64();
        Self::with_stream(seed, stream)
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.standard_normal();
        }
    }
}

impl RngCore for RandomStream {
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
