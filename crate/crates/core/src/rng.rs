//! Seeded random streams.
//!
//! Every random quantity is a function of `(seed, purpose, draw index)`.
//! Draws are grouped in fixed-size chunks; chunk `k` of a purpose reads from
//! ChaCha stream `k`, so a chunk can be generated on any worker and the
//! result does not depend on how many workers there are.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Number of draws per substream.
pub const CHUNK: usize = 1 << 14;

/// Separates the random streams of independent consumers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    UserPosition,
    RfChannel,
    QueueService,
    Custom(u64),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::UserPosition => 0x7573_6572_706f_7331,
            Purpose::RfChannel => 0x7266_6368_616e_6e31,
            Purpose::QueueService => 0x7175_6575_6573_7631,
            Purpose::Custom(t) => t.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 0x6375_7374_6f6d_0000,
        }
    }
}

/// Root seed of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamSeed(pub u64);

impl StreamSeed {
    /// The generator for substream `index` of `purpose`.
    pub fn substream(self, purpose: Purpose, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(self.0 ^ purpose.tag()));
        rng.set_stream(index);
        rng
    }

    /// The generator feeding chunk `chunk` (draws `chunk*CHUNK ..`).
    pub fn chunk(self, purpose: Purpose, chunk: usize) -> ChaCha8Rng {
        self.substream(purpose, chunk as u64)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform on `[0, 1)`.
#[inline]
pub fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
