//! Seed derivation for independent, reproducible random streams.
//!
//! Every random draw in a simulation comes from a ChaCha stream keyed by the
//! user seed plus a path of indices (superframe, frame, purpose). Streams do
//! not depend on scheduling, so results are identical for any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purposes; keeps e.g. data bits and noise of one frame independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Channel = 1,
    Data = 2,
    Noise = 3,
    PilotSearch = 4,
    Probe = 5,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a path of indices into a new 64-bit seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix(seed), |acc, &p| splitmix(acc ^ splitmix(p)))
}

pub fn stream(seed: u64, purpose: Stream, path: &[u64]) -> ChaCha8Rng {
    let s = derive_seed(derive_seed(seed, &[purpose as u64]), path);
    ChaCha8Rng::seed_from_u64(s)
}
