//! Seeded random streams.
//!
//! Every random draw in the crate comes from `ChaCha8Rng` (rand_chacha 0.3)
//! seeded through [`rand::SeedableRng::seed_from_u64`]. Independent streams
//! are derived by folding a list of tags (step number, batch slot, ...) into
//! the base seed with the SplitMix64 finalizer, so the draw for a given slot
//! never depends on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream keyed by `seed` and an ordered list of tags.
pub fn stream(seed: u64, tags: &[u64]) -> Rng {
    let mut key = splitmix64(seed);
    for &tag in tags {
        key = splitmix64(key ^ splitmix64(tag.wrapping_add(0x632B_E59B_D9B4_E019)));
    }
    ChaCha8Rng::seed_from_u64(key)
}
