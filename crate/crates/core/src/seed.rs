//! Deterministic sub-seed derivation.
//!
//! Every randomised step (k-means per `(source, k)` run, tie-breaking in the
//! vote) draws from its own ChaCha8 stream whose seed is derived from the
//! root seed and a tag. Adding or removing a source never perturbs the
//! randomness of the other runs.
//!
//! Mixing uses the SplitMix64 finaliser; string tags are folded with 64-bit
//! FNV-1a.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a over the UTF-8 bytes of `tag`.
pub fn fnv1a64(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

/// `mix(mix(mix(root + γ) ^ fnv(tag)) ^ index)`.
pub fn derive_seed(root: u64, tag: &str, index: u64) -> u64 {
    let h = mix64(root.wrapping_add(GOLDEN_GAMMA));
    let h = mix64(h ^ fnv1a64(tag));
    mix64(h ^ index)
}

/// Tag reserved for the tie-break stream of the vote. The leading NUL keeps
/// it out of the space of printable source names.
pub(crate) const VOTE_TAG: &str = "\0vote";

/// The generator used everywhere in the crate. ChaCha8 output is specified
/// by `rand_chacha` to be identical across platforms and versions for a
/// given seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
