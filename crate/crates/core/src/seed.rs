//! Stable seed derivation.
//!
//! Every random stream in the pipeline is a `ChaCha8Rng` seeded from a 64-bit
//! value. Sub-seeds are derived with the SplitMix64 finalizer so that they are
//! identical on every platform and independent of scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere randomness is needed.
pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a seed for a named purpose (FNV-1a over the label, then mixed).
pub fn derive(seed: u64, purpose: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in purpose.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix64(seed ^ mix64(h))
}

/// Per-sample augmentation seed, independent of worker order.
pub fn sample_seed(base: u64, epoch: usize, index: usize) -> u64 {
    mix64(mix64(base ^ mix64(epoch as u64)) ^ index as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_is_stable_and_label_sensitive() {
        assert_eq!(derive(7, "split"), derive(7, "split"));
        assert_ne!(derive(7, "split"), derive(7, "init"));
        assert_ne!(derive(7, "split"), derive(8, "split"));
    }

    #[test]
    fn sample_seeds_distinct() {
        let a = sample_seed(1, 0, 0);
        assert_ne!(a, sample_seed(1, 0, 1));
        assert_ne!(a, sample_seed(1, 1, 0));
        assert_eq!(a, sample_seed(1, 0, 0));
    }
}
