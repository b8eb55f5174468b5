//! Seeded random streams.
//!
//! Every random draw in the workbench comes from a [`ChaCha8Rng`]. A trial's
//! stream is keyed by a 64-bit seed derived from the sweep's master seed and
//! the trial's coordinates with [`derive_seed`]:
//!
//! ```text
//! h0 = splitmix64(master)
//! h(t+1) = splitmix64(h(t) ^ part(t))
//! seed = h(last)
//! ```
//!
//! The derived seed depends only on `(master, parts)`, never on execution
//! order, so trials can run in any order or in parallel and still reproduce.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// One step of the SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(master), |h, &p| splitmix64(h ^ p))
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}
