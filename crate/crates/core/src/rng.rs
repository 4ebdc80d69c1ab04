//! Reproducible random streams.
//!
//! Every stream is ChaCha8 (RFC 7539 block function, 8 rounds) keyed by
//! `seed` expanded through PCG32 as done by `SeedableRng::seed_from_u64`,
//! with the 64-bit ChaCha stream word set to `stream_id`. The output for a
//! given `(seed, stream_id)` is therefore fixed across runs and platforms.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Draws a fresh independent generator for one sampling task. Used to
    /// hand out per-sample generators in a fixed order before fanning out to
    /// workers.
    pub fn fork(&mut self) -> SeededRng {
        let seed = self.inner.next_u64();
        SeededRng::new(seed, 0)
    }
}

impl RngCore for SeededRng {
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
