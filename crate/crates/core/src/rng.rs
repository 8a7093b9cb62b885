//! Reproducible random number streams.
//!
//! Every random quantity in the crate is drawn from a [`NoiseStream`]: a
//! `(seed, stream_index)` pair materialized as a ChaCha8 generator. The seed
//! is expanded to a 256-bit key with `SeedableRng::seed_from_u64` (PCG32 based,
//! platform independent) and the stream index selects ChaCha's 64-bit stream
//! word, so distinct indices give non-overlapping keystreams under one key.
//! Monte Carlo path `k` uses stream index `k`; paths can be generated in any
//! order or in parallel with identical results.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Value specification of an independent random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl NoiseStream {
    pub const fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    /// The `k`-th sibling stream under the same seed.
    pub const fn with_index(self, stream_index: u64) -> Self {
        Self { seed: self.seed, stream_index }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// The first `n` standard normal variates of this stream.
    pub fn standard_normals(&self, n: usize) -> Vec<f64> {
        let mut rng = self.rng();
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }
}
