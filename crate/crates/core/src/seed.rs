//! Named child seeds.
//!
//! Every random stream in the crate is derived from one run seed:
//! `child_seed(seed, purpose, index)` is the first eight bytes (little endian)
//! of `SHA-256(seed_le || purpose || index_le)`. Purposes in use are
//! `"split"`, `"subsample"`, `"sparsity"`, `"shuffle"`, `"runtime"` and
//! `"oracle"`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn child_seed(seed: u64, purpose: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(purpose.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn child_rng(seed: u64, purpose: &str, index: u64) -> ChaCha8Rng {
    rng(child_seed(seed, purpose, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn child_seeds_are_stable_and_distinct() {
        assert_eq!(child_seed(42, "split", 0), child_seed(42, "split", 0));
        assert_ne!(child_seed(42, "split", 0), child_seed(42, "split", 1));
        assert_ne!(child_seed(42, "split", 0), child_seed(42, "sparsity", 0));
        assert_ne!(child_seed(42, "split", 0), child_seed(43, "split", 0));
    }
}
