//! Seeded random streams and replica seed derivation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The stream used everywhere: fast, portable, fully determined by a
/// 64-bit seed.
pub type SeededRng = ChaCha8Rng;

/// Build a stream from an explicit 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Derive an independent stream seed for a replica or sub-task.
///
/// SplitMix64 finalizer over the mixed pair, so consecutive indices give
/// unrelated streams.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
