use sha2::{Digest, Sha256};

use crate::algebra::seed::Seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundLabel {
    pub round: u64,
    pub gamma: u64,
}

/// `gamma_t = SHA-256(domain || seed || t) mod label_bound`.
pub fn derive_label(seed: &Seed, round: u64, label_bound: u64) -> RoundLabel {
    assert!(label_bound > 0, "label bound must be positive");
    let mut h = Sha256::new();
    h.update(b"fedmife/label/v1");
    h.update(seed);
    h.update(round.to_be_bytes());
    let digest = h.finalize();
    let mut wide = [0u8; 16];
    wide.copy_from_slice(&digest[..16]);
    let gamma = (u128::from_be_bytes(wide) % u128::from(label_bound)) as u64;
    RoundLabel { round, gamma }
}
