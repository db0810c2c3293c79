//! Named random streams.
//!
//! Each run derives one ChaCha stream per purpose from its seed, so demand
//! draws, corruption choices, learner sampling and SAA samples never share
//! state and can each be replayed independently.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. The discriminant is the ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Demand,
    Corruption,
    Dual,
    Primal,
    /// SAA samples for group `n` of a fluid or saddle solve.
    Saa(u32),
}

impl Purpose {
    fn stream_id(self) -> u64 {
        match self {
            Purpose::Demand => 1,
            Purpose::Corruption => 2,
            Purpose::Dual => 3,
            Purpose::Primal => 4,
            Purpose::Saa(n) => 1 << 32 | n as u64,
        }
    }
}

pub fn stream(seed: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose.stream_id());
    rng
}
