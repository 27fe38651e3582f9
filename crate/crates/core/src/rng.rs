//! Seed handling. Every stochastic routine takes a generator derived from a
//! [`RandomSeed`]; sub-seeds come from hashing `(seed, label, index)` so that
//! streams for different trials or sweep points need no coordination.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    /// Child seed for stream `index` under `label`.
    ///
    /// The derivation is `splitmix64(splitmix64(seed ^ fnv1a(label)) ^ index)`,
    /// so it is stable across platforms and releases.
    pub fn derive(self, label: &str, index: u64) -> RandomSeed {
        let tagged = splitmix64(self.0 ^ fnv1a(label.as_bytes()));
        RandomSeed(splitmix64(tagged ^ index))
    }

    pub fn rng(self) -> Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for RandomSeed {
    fn from(seed: u64) -> Self {
        RandomSeed(seed)
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
