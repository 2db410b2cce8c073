//! Counter-based uniform streams keyed by `(seed, stream_id)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform draws on the open interval `(0, 1)`.
///
/// Each `(seed, stream_id)` pair selects an independent ChaCha8 stream, so
/// work split across blocks reproduces bit-exactly regardless of scheduling.
#[derive(Debug, Clone)]
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        UniformStream { rng }
    }

    pub fn next_open01(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}
