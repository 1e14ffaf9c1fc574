//! Deterministic seed derivation.
//!
//! Every random choice in the crate is drawn from a [`ChaCha20Rng`] whose seed
//! is derived from a parent seed, a domain tag and an index. Work split across
//! threads therefore produces the same bytes as sequential work.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub type Seed = [u8; 32];

pub fn derive_seed(parent: &Seed, tag: &str, index: u64) -> Seed {
    let mut h = Sha256::new();
    h.update(b"fedmife/seed/v1");
    h.update(parent);
    h.update((tag.len() as u32).to_be_bytes());
    h.update(tag.as_bytes());
    h.update(index.to_be_bytes());
    h.finalize().into()
}

pub fn rng_from(seed: Seed) -> ChaCha20Rng {
    ChaCha20Rng::from_seed(seed)
}

pub fn child_rng(parent: &Seed, tag: &str, index: u64) -> ChaCha20Rng {
    rng_from(derive_seed(parent, tag, index))
}

/// Expands a `u64` into a full seed.
pub fn seed_from_u64(v: u64) -> Seed {
    derive_seed(&[0u8; 32], "u64", v)
}
