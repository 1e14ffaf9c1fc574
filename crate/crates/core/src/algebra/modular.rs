//! Canonical residues in `[0, m)` and their signed interpretation.

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

/// Reduces a signed integer into `[0, m)`.
pub fn reduce(v: &BigInt, m: &BigUint) -> BigUint {
    let m_signed = BigInt::from_biguint(Sign::Plus, m.clone());
    let r = v.mod_floor(&m_signed);
    r.to_biguint().expect("mod_floor by a positive modulus is non-negative")
}

pub fn reduce_i64(v: i64, m: &BigUint) -> BigUint {
    reduce(&BigInt::from(v), m)
}

/// Lifts a residue to `(-m/2, m/2]`.
pub fn centered(v: &BigUint, m: &BigUint) -> BigInt {
    let half = m >> 1u32;
    if v > &half {
        BigInt::from(v.clone()) - BigInt::from(m.clone())
    } else {
        BigInt::from(v.clone())
    }
}

/// The representative of `v mod m` lying in `[lower, lower + m)`.
pub fn lift_from(v: &BigUint, m: &BigUint, lower: i64) -> BigInt {
    let lower_big = BigInt::from(lower);
    let offset = reduce(&(BigInt::from(v.clone()) - &lower_big), m);
    lower_big + BigInt::from(offset)
}

pub fn random_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    rng.gen_biguint_below(bound)
}

/// Ceiling of the integer square root.
pub fn ceil_sqrt(v: u128) -> u128 {
    if v == 0 {
        return 0;
    }
    let r = num_integer::Roots::sqrt(&v);
    if r * r == v {
        r
    } else {
        r + 1
    }
}

/// Bit length of the largest canonical residue, i.e. `ceil(log2 m)` for `m > 1`.
pub fn residue_bits(m: &BigUint) -> u64 {
    if m <= &BigUint::one() {
        return 0;
    }
    (m - 1u32).bits()
}

pub fn residue_bytes(m: &BigUint) -> usize {
    residue_bits(m).div_ceil(8) as usize
}

pub fn is_zero(v: &BigUint) -> bool {
    v.is_zero()
}
