//! Counter-based random streams.
//!
//! A stream is addressed by `(seed, stream_id)`. The same address always
//! reproduces the same draws, and trial `t` of a sweep always reads stream
//! `t`, so results do not depend on the order in which trials execute.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Address of an independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Materialise the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Stream `trial` within the family rooted at this stream.
    ///
    /// The family key is a hash of `(seed, stream_id)`, so the trials of two
    /// different roots never collide.
    pub fn trial(&self, trial: u64) -> RngStream {
        RngStream {
            seed: mix(self.seed ^ mix(self.stream_id.wrapping_add(0x5851_f42d_4c95_7f2d))),
            stream_id: trial,
        }
    }

    /// A labelled child stream, used to keep independent purposes
    /// (e.g. "labeled sample" vs "test sample") apart under one root.
    pub fn child(&self, tag: u64) -> RngStream {
        RngStream {
            seed: mix(self.seed.wrapping_add(mix(tag ^ 0xa076_1d64_78bd_642f))),
            stream_id: self.stream_id,
        }
    }
}

// splitmix64 finaliser
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
