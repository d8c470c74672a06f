//! Seeded random streams.
//!
//! Every random draw in the engines comes from a stream keyed by
//! `(seed, generation, slot)`, so results do not depend on the order in which
//! parallel workers happen to run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Slot reserved for population initialisation.
pub const INIT_SLOT: u64 = u64::MAX;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, generation: u64, slot: u64) -> StreamRng {
    let key = splitmix64(seed ^ splitmix64(generation));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(slot);
    rng
}
