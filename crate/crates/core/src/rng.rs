//! Deterministic random streams.
//!
//! A stream is a ChaCha8 generator seeded with `ChaCha8Rng::seed_from_u64(seed)`
//! (rand_core's PCG32-based seed expansion) and switched to ChaCha stream
//! `stream`. Uniform reals are `rand`'s `StandardUniform` for `f64` (53 random
//! bits scaled into `[0, 1)`); Gaussian draws use `rand_distr::StandardNormal`
//! (ziggurat). Any implementation reproducing those three pieces reproduces the
//! sample sequence of a `(seed, stream)` pair bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngStream {
            inner,
            seed,
            stream,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on `[lo, hi]`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        (lo + (hi - lo) * self.uniform()).clamp(lo, hi)
    }

    pub fn gaussian(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// `true` with probability `p`.
    /// Always consumes exactly one uniform draw.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}
