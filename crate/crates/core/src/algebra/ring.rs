use alloc::vec::Vec;
use core::fmt::Debug;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, RngCore};

use super::bytes::{self, Reader};
use super::modular;
use crate::{Error, Result};

/// Arithmetic in `Z_q` with canonical representatives in `[0, q)`.
///
/// Dot products and matrix-vector products accumulate lazily and reduce once
/// per output entry.
#[allow(clippy::wrong_self_convention)]
pub trait ModRing: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Debug + Send + Sync;
    type Acc;

    fn from_modulus(q: &BigUint) -> Result<Self>;
    fn modulus(&self) -> &BigUint;
    fn zero(&self) -> Self::Elem;
    fn from_i128(&self, v: i128) -> Self::Elem;
    fn from_biguint(&self, v: &BigUint) -> Self::Elem;
    fn to_biguint(&self, a: &Self::Elem) -> BigUint;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn acc_zero(&self) -> Self::Acc;
    fn acc_add(&self, acc: &mut Self::Acc, a: &Self::Elem);
    fn acc_add_mul(&self, acc: &mut Self::Acc, a: &Self::Elem, b: &Self::Elem);
    fn acc_reduce(&self, acc: Self::Acc) -> Self::Elem;

    /// Serialized width: `ceil(log2 q)` rounded up to whole bytes.
    fn byte_width(&self) -> usize {
        modular::residue_bytes(self.modulus())
    }

    fn write_le(&self, a: &Self::Elem, out: &mut Vec<u8>) {
        bytes::write_le(&self.to_biguint(a), self.byte_width(), out);
    }

    fn read_le(&self, r: &mut Reader<'_>) -> Result<Self::Elem> {
        let v = r.le(self.byte_width())?;
        if &v >= self.modulus() {
            return Err(Error::Malformed("ring element out of range"));
        }
        Ok(self.from_biguint(&v))
    }

    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        debug_assert_eq!(a.len(), b.len());
        let mut acc = self.acc_zero();
        for (x, y) in a.iter().zip(b) {
            self.acc_add_mul(&mut acc, x, y);
        }
        self.acc_reduce(acc)
    }

    /// `matrix * v` for a row-major `rows x cols` matrix.
    fn mat_vec(&self, matrix: &[Self::Elem], rows: usize, cols: usize, v: &[Self::Elem]) -> Vec<Self::Elem> {
        debug_assert_eq!(matrix.len(), rows * cols);
        debug_assert_eq!(v.len(), cols);
        matrix.chunks(cols).map(|row| self.dot(row, v)).collect()
    }

    /// `matrix^T * v` for a row-major `rows x cols` matrix.
    fn mat_t_vec(&self, matrix: &[Self::Elem], rows: usize, cols: usize, v: &[Self::Elem]) -> Vec<Self::Elem> {
        debug_assert_eq!(matrix.len(), rows * cols);
        debug_assert_eq!(v.len(), rows);
        let mut accs: Vec<Self::Acc> = (0..cols).map(|_| self.acc_zero()).collect();
        for (row, coeff) in matrix.chunks(cols).zip(v) {
            for (acc, x) in accs.iter_mut().zip(row) {
                self.acc_add_mul(acc, x, coeff);
            }
        }
        accs.into_iter().map(|a| self.acc_reduce(a)).collect()
    }

    /// `matrix^T * r` for a binary selector `r`: the sum of the selected rows.
    fn sum_rows(&self, matrix: &[Self::Elem], cols: usize, selector: &[bool]) -> Vec<Self::Elem> {
        debug_assert_eq!(matrix.len(), selector.len() * cols);
        let mut accs: Vec<Self::Acc> = (0..cols).map(|_| self.acc_zero()).collect();
        for (row, _) in matrix.chunks(cols).zip(selector).filter(|(_, &s)| s) {
            for (acc, x) in accs.iter_mut().zip(row) {
                self.acc_add(acc, x);
            }
        }
        accs.into_iter().map(|a| self.acc_reduce(a)).collect()
    }
}

/// `Z_q` for `q < 2^64`, backed by `u64` with `u128` accumulators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordRing {
    q: u64,
    q_big: BigUint,
}

impl WordRing {
    pub fn new(q: &BigUint) -> Result<Self> {
        let q64 = q
            .to_u64()
            .filter(|&v| v >= 2)
            .ok_or_else(|| Error::invalid("word ring modulus must be in [2, 2^64)"))?;
        Ok(Self {
            q: q64,
            q_big: q.clone(),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

impl ModRing for WordRing {
    type Elem = u64;
    type Acc = u128;

    fn from_modulus(q: &BigUint) -> Result<Self> {
        Self::new(q)
    }

    fn modulus(&self) -> &BigUint {
        &self.q_big
    }

    fn zero(&self) -> u64 {
        0
    }

    fn from_i128(&self, v: i128) -> u64 {
        v.rem_euclid(i128::from(self.q)) as u64
    }

    fn from_biguint(&self, v: &BigUint) -> u64 {
        (v % self.q).to_u64().expect("reduced below a u64 modulus")
    }

    fn to_biguint(&self, a: &u64) -> BigUint {
        BigUint::from(*a)
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((u128::from(*a) + u128::from(*b)) % u128::from(self.q)) as u64
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((u128::from(*a) + u128::from(self.q) - u128::from(*b)) % u128::from(self.q)) as u64
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((u128::from(*a) * u128::from(*b)) % u128::from(self.q)) as u64
    }

    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.q)
    }

    fn acc_zero(&self) -> u128 {
        0
    }

    fn acc_add(&self, acc: &mut u128, a: &u64) {
        // Overflow would need 2^64 additions.
        *acc += u128::from(*a);
    }

    fn acc_add_mul(&self, acc: &mut u128, a: &u64, b: &u64) {
        let p = u128::from(*a) * u128::from(*b);
        *acc = match acc.checked_add(p) {
            Some(s) => s,
            None => (*acc % u128::from(self.q)) + (p % u128::from(self.q)),
        };
    }

    fn acc_reduce(&self, acc: u128) -> u64 {
        (acc % u128::from(self.q)) as u64
    }
}

/// `Z_q` for arbitrary `q`, backed by [`BigUint`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigRing {
    q: BigUint,
}

impl BigRing {
    pub fn new(q: &BigUint) -> Result<Self> {
        if q < &BigUint::from(2u32) {
            return Err(Error::invalid("ring modulus must be at least 2"));
        }
        Ok(Self { q: q.clone() })
    }
}

impl ModRing for BigRing {
    type Elem = BigUint;
    type Acc = BigUint;

    fn from_modulus(q: &BigUint) -> Result<Self> {
        Self::new(q)
    }

    fn modulus(&self) -> &BigUint {
        &self.q
    }

    fn zero(&self) -> BigUint {
        BigUint::default()
    }

    fn from_i128(&self, v: i128) -> BigUint {
        modular::reduce(&num_bigint::BigInt::from(v), &self.q)
    }

    fn from_biguint(&self, v: &BigUint) -> BigUint {
        v % &self.q
    }

    fn to_biguint(&self, a: &BigUint) -> BigUint {
        a.clone()
    }

    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.q
    }

    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + &self.q - b) % &self.q
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.q
    }

    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        modular::random_below(rng, &self.q)
    }

    fn acc_zero(&self) -> BigUint {
        BigUint::default()
    }

    fn acc_add(&self, acc: &mut BigUint, a: &BigUint) {
        *acc += a;
    }

    fn acc_add_mul(&self, acc: &mut BigUint, a: &BigUint, b: &BigUint) {
        *acc += a * b;
    }

    fn acc_reduce(&self, acc: BigUint) -> BigUint {
        acc % &self.q
    }
}
