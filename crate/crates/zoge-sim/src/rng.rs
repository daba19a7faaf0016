//! Deterministic stream derivation for ensemble runs.
//!
//! Every random quantity in a sweep (disorder phase draws, random-state
//! phases) comes from a ChaCha generator whose (seed, stream) pair is a pure
//! function of the base seed plus the task coordinates. Re-running a config
//! therefore reproduces every draw bit for bit, independent of worker count
//! or task scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Splittable seed root for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedPlan {
    pub base: u64,
}

impl SeedPlan {
    pub fn new(base: u64) -> Self {
        Self { base }
    }

    /// Generator for the disorder-phase draws of a realization set.
    pub fn realization_rng(&self) -> ChaCha12Rng {
        rng_stream(self.base, 0x52_45_41_4c)
    }

    /// Generator for the random-state phases of (realization, seed index).
    pub fn state_rng(&self, realization: usize, seed_index: usize) -> ChaCha12Rng {
        rng_stream(self.base, mix2(realization as u64, seed_index as u64))
    }
}

fn rng_stream(base: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(base);
    rng.set_stream(stream);
    rng
}

// splitmix64-style finalizer; collision-free enough for task coordinates.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn mix2(a: u64, b: u64) -> u64 {
    mix(mix(a).wrapping_add(b).wrapping_add(1))
}
