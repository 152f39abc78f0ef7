//! Seeded random streams.
//!
//! All randomness is drawn from ChaCha8 (via `rand_chacha`). A [`SeedStreams`]
//! value fixes a 64-bit seed; `stream(k)` yields the `k`-th independent ChaCha
//! stream under that seed. Parallel work takes one stream per work item, which
//! makes results identical under sequential and parallel execution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type StreamRng = ChaCha8Rng;

/// A family of independent ChaCha8 streams sharing one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStreams {
    seed: u64,
}

impl SeedStreams {
    pub fn new(seed: u64) -> Self {
        SeedStreams { seed }
    }

    /// Draws a fresh seed from `rng`.
    pub fn from_rng<R: Rng + ?Sized>(rng: &mut R) -> Self {
        SeedStreams { seed: rng.random() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// A derived family, for handing a whole sub-computation its own streams.
    pub fn fork(&self, tag: u64) -> SeedStreams {
        let mut rng = self.stream(u64::MAX - tag);
        SeedStreams::from_rng(&mut rng)
    }
}

/// Convenience: a single generator from a seed.
pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
