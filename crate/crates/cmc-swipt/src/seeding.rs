//! Deterministic seed derivation.
//!
//! Every random draw in the crate flows through a ChaCha8 stream whose seed
//! is derived from a master seed with the splitmix64 finalizer. Derivations
//! are pure, so any (master seed, purpose, indices) tuple names the same
//! stream forever, independent of call order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 output stage.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a salt.
pub fn derive(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt))
}

/// Seed for one Monte-Carlo trial: master seed mixed with the sweep index,
/// then with the trial index. Each sweep point is independently reproducible.
pub fn trial_seed(master_seed: u64, sweep_index: usize, trial_index: usize) -> u64 {
    derive(derive(master_seed, sweep_index as u64), trial_index as u64)
}

/// Deterministic ChaCha8 stream for a derived seed.
pub fn stream(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, salt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_salt_sensitive() {
        assert_eq!(derive(42, 1), derive(42, 1));
        assert_ne!(derive(42, 1), derive(42, 2));
        assert_ne!(derive(42, 1), derive(43, 1));
    }

    #[test]
    fn trial_seeds_do_not_collide_on_small_grids() {
        let mut seen = std::collections::HashSet::new();
        for sweep in 0..16 {
            for trial in 0..512 {
                assert!(seen.insert(trial_seed(7, sweep, trial)));
            }
        }
    }
}
