use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

/// Precomputed powers of one base for fast exponentiation with a fixed base.
///
/// The exponent is split into `window_bits`-wide digits; window `k` stores
/// `base^(j * 2^(k * window_bits))` for every nonzero digit `j`, so an
/// exponentiation costs one multiplication per nonzero digit.
#[derive(Clone, Debug)]
pub struct FixedBaseTable {
    modulus: BigUint,
    window_bits: u32,
    windows: usize,
    powers: Vec<BigUint>,
}

impl FixedBaseTable {
    pub fn new(base: &BigUint, modulus: &BigUint, max_exp_bits: u64, window_bits: u32) -> Self {
        assert!((1..=12).contains(&window_bits), "window must be 1..=12 bits");
        let windows = (max_exp_bits.max(1)).div_ceil(u64::from(window_bits)) as usize;
        let per_window = (1usize << window_bits) - 1;
        let mut powers = Vec::with_capacity(windows * per_window);
        let mut window_base = base % modulus;
        for _ in 0..windows {
            let mut acc = window_base.clone();
            for _ in 0..per_window {
                powers.push(acc.clone());
                acc = (&acc * &window_base) % modulus;
            }
            // acc is now window_base^(2^window_bits)
            window_base = acc;
        }
        Self {
            modulus: modulus.clone(),
            window_bits,
            windows,
            powers,
        }
    }

    pub fn pow(&self, exp: &BigUint) -> BigUint {
        let per_window = (1usize << self.window_bits) - 1;
        assert!(
            exp.bits() <= (self.windows as u64) * u64::from(self.window_bits),
            "exponent wider than the table"
        );
        let mut acc = BigUint::one();
        let mask = (1u64 << self.window_bits) - 1;
        let digits = exp.iter_u64_digits().collect::<Vec<_>>();
        for k in 0..self.windows {
            let bit = k * self.window_bits as usize;
            let digit = extract_bits(&digits, bit, self.window_bits) & mask;
            if digit != 0 {
                acc = (&acc * &self.powers[k * per_window + digit as usize - 1]) % &self.modulus;
            }
        }
        acc
    }
}

fn extract_bits(limbs: &[u64], bit: usize, width: u32) -> u64 {
    let limb = bit / 64;
    let offset = bit % 64;
    let lo = limbs.get(limb).copied().unwrap_or(0) >> offset;
    if offset + width as usize > 64 {
        let hi = limbs.get(limb + 1).copied().unwrap_or(0) << (64 - offset);
        lo | hi
    } else {
        lo
    }
}
