//! Memory cost of keys and ciphertexts for `m = 1`, in bits.
//!
//! With `L = log q`, `n` clients and lattice dimensions `(N, M)`:
//!
//! | scheme        | client key      | functional key     | ciphertext |
//! |---------------|-----------------|--------------------|------------|
//! | ddh-selective | `2L`            | `(n+1)L + n`       | `2L`       |
//! | ddh-adaptive  | `3L`            | `(2n+1)L + n`      | `3L`       |
//! | lwe-selective | `L(MN + M + 1)` | `L(nN + 1) + n`    | `L(N + 1)` |
//! | lwe-adaptive  | `L(MN + N + 1)` | `L(nM + 1) + n`    | `L(M + 1)` |
//!
//! The trailing `+ n` is one bit per entry of the all-ones key vector.

use crate::ipfe::SchemeId;
use crate::params::ParamPreset;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryCost {
    pub client_key_bits: u128,
    pub functional_key_bits: u128,
    pub ciphertext_bits: u128,
}

impl MemoryCost {
    /// Ciphertext volume of one round: `n` clients each sending `l`
    /// ciphertexts.
    pub fn round_ciphertext_bits(&self, clients: u64, params: u64) -> u128 {
        self.ciphertext_bits * u128::from(clients) * u128::from(params)
    }
}

pub fn memory_cost(scheme: SchemeId, log_q: u64, secret_dim: u64, samples: u64, clients: u64) -> MemoryCost {
    let (l, big_n, big_m, n) = (
        u128::from(log_q),
        u128::from(secret_dim),
        u128::from(samples),
        u128::from(clients),
    );
    let (client_key_bits, functional_key_bits, ciphertext_bits) = match scheme {
        SchemeId::DdhSelective => (2 * l, (n + 1) * l + n, 2 * l),
        SchemeId::DdhAdaptive => (3 * l, (2 * n + 1) * l + n, 3 * l),
        SchemeId::LweSelective => (
            l * (big_m * big_n + big_m + 1),
            l * (n * big_n + 1) + n,
            l * (big_n + 1),
        ),
        SchemeId::LweAdaptive => (
            l * (big_m * big_n + big_n + 1),
            l * (n * big_m + 1) + n,
            l * (big_m + 1),
        ),
    };
    MemoryCost {
        client_key_bits,
        functional_key_bits,
        ciphertext_bits,
    }
}

pub fn preset_cost(preset: &ParamPreset, clients: u64) -> MemoryCost {
    let (n, m) = preset.lattice_dims();
    memory_cost(preset.scheme, preset.log_q(), n as u64, m as u64, clients)
}

pub const KIB: f64 = 8.0 * 1024.0;
pub const MIB: f64 = KIB * 1024.0;
pub const GIB: f64 = MIB * 1024.0;

/// Converts bits to the given unit (`KIB`, `MIB`, `GIB`).
pub fn in_units(bits: u128, unit: f64) -> f64 {
    bits as f64 / unit
}
