use alloc::vec::Vec;

use num_bigint::BigUint;

use super::{modular, GroupParams};
use crate::{Error, Result};

/// Inclusive exponent range searched by the bounded discrete logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DlogWindow {
    lower: i64,
    upper: i64,
}

impl DlogWindow {
    /// Largest window accepted by [`DlogWindow::new`].
    pub const DEFAULT_CAP: u64 = 1 << 48;

    pub fn new(lower: i64, upper: i64) -> Result<Self> {
        Self::with_cap(lower, upper, Self::DEFAULT_CAP)
    }

    pub fn with_cap(lower: i64, upper: i64, cap: u64) -> Result<Self> {
        if lower > upper {
            return Err(Error::invalid("dlog window lower bound exceeds upper bound"));
        }
        let w = Self { lower, upper };
        if w.width() as u128 > u128::from(cap) {
            return Err(Error::invalid("dlog window exceeds the feasibility cap"));
        }
        Ok(w)
    }

    pub fn lower(&self) -> i64 {
        self.lower
    }

    pub fn upper(&self) -> i64 {
        self.upper
    }

    /// Number of exponents in the window.
    pub fn width(&self) -> u64 {
        (i128::from(self.upper) - i128::from(self.lower) + 1) as u64
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Baby-step giant-step solver with a reusable baby-step table.
///
/// The table stores the low 64 bits of `g^j` for `j < table_size`, sorted, and
/// every fingerprint hit is confirmed by exponentiation, so collisions in the
/// fingerprint cannot produce a wrong answer.
#[derive(Clone, Debug)]
pub struct BabyStepTable {
    group: GroupParams,
    window: DlogWindow,
    table_size: u64,
    fingerprints: Vec<u64>,
    exponents: Vec<u32>,
    giant_step: BigUint,
    shift: BigUint,
}

fn fingerprint(v: &BigUint) -> u64 {
    v.iter_u64_digits().next().unwrap_or(0)
}

impl BabyStepTable {
    /// Smallest table that keeps a single search at `O(sqrt(width))`.
    pub fn balanced_size(window: &DlogWindow) -> u64 {
        modular::ceil_sqrt(u128::from(window.width())) as u64
    }

    /// Table size minimising build cost plus `uses` searches, capped at `max`.
    pub fn amortized_size(window: &DlogWindow, uses: u64, max: u64) -> u64 {
        let ideal = modular::ceil_sqrt(u128::from(window.width()) * u128::from(uses.max(1)));
        (ideal as u64)
            .min(max)
            .max(Self::balanced_size(window).min(max))
            .min(window.width())
            .max(1)
    }

    pub fn new(group: &GroupParams, window: DlogWindow, table_size: u64) -> Result<Self> {
        if table_size == 0 || table_size > u64::from(u32::MAX) {
            return Err(Error::invalid("baby-step table size out of range"));
        }
        let table_size = table_size.min(window.width());
        let mut entries = Vec::with_capacity(table_size as usize);
        let mut cur = group.identity();
        for j in 0..table_size {
            entries.push((fingerprint(&cur), j as u32));
            cur = group.mul(&cur, group.generator());
        }
        entries.sort_unstable();
        let (fingerprints, exponents) = entries.into_iter().unzip();
        // cur = g^table_size
        let giant_step = group.inverse(&cur);
        let neg_lower = num_bigint::BigInt::from(-i128::from(window.lower()));
        let shift = group.pow_g(&modular::reduce(&neg_lower, group.order()));
        Ok(Self {
            group: group.clone(),
            window,
            table_size,
            fingerprints,
            exponents,
            giant_step,
            shift,
        })
    }

    pub fn window(&self) -> DlogWindow {
        self.window
    }

    pub fn table_size(&self) -> u64 {
        self.table_size
    }

    /// Returns the unique `e` in the window with `g^e = target`.
    pub fn solve(&self, target: &BigUint) -> Result<i64> {
        let width = self.window.width();
        let shifted = self.group.mul(target, &self.shift);
        let giants = width.div_ceil(self.table_size);
        let mut gamma = shifted.clone();
        for i in 0..giants {
            let fp = fingerprint(&gamma);
            let start = self.fingerprints.partition_point(|&f| f < fp);
            for k in start..self.fingerprints.len() {
                if self.fingerprints[k] != fp {
                    break;
                }
                let offset = i * self.table_size + u64::from(self.exponents[k]);
                if offset < width && self.group.pow_g(&BigUint::from(offset)) == shifted {
                    return Ok(self.window.lower() + offset as i64);
                }
            }
            gamma = self.group.mul(&gamma, &self.giant_step);
        }
        Err(Error::DlogNotFound {
            lower: self.window.lower(),
            upper: self.window.upper(),
        })
    }
}

/// One-shot bounded discrete logarithm with a balanced table.
pub fn bounded_dlog(group: &GroupParams, target: &BigUint, window: DlogWindow) -> Result<i64> {
    let size = BabyStepTable::balanced_size(&window);
    BabyStepTable::new(group, window, size)?.solve(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{group_gen, seed};
    use rand::Rng;

    #[test]
    fn toy_examples() {
        let g = group_gen("toy").unwrap();
        let w = DlogWindow::new(0, 10).unwrap();
        // brute force: the exponent e with 4^e = 18 (mod 23)
        let expected = (0u32..11)
            .find(|&e| g.pow_g(&e.into()) == BigUint::from(18u32))
            .unwrap();
        assert_eq!(expected, 3);
        assert_eq!(bounded_dlog(&g, &BigUint::from(18u32), w).unwrap(), 3);
        assert_eq!(bounded_dlog(&g, &g.identity(), w).unwrap(), 0);
        let small = DlogWindow::new(0, 2).unwrap();
        assert_eq!(
            bounded_dlog(&g, &BigUint::from(5u32), small),
            Err(Error::DlogNotFound { lower: 0, upper: 2 })
        );
    }

    #[test]
    fn identity_in_any_group() {
        for preset in ["toy", "toy-512", "nist-3072"] {
            let g = group_gen(preset).unwrap();
            let w = DlogWindow::new(0, 1000).unwrap();
            assert_eq!(bounded_dlog(&g, &g.identity(), w).unwrap(), 0);
        }
    }

    #[test]
    fn window_contract() {
        assert!(DlogWindow::new(5, 4).is_err());
        assert!(DlogWindow::new(0, 1 << 48).is_err());
        assert!(DlogWindow::new(1, 1 << 48).is_ok());
        assert_eq!(DlogWindow::new(-3, 3).unwrap().width(), 7);
    }

    #[test]
    fn negative_windows_and_table_sizes() {
        let g = group_gen("toy-512").unwrap();
        let mut rng = seed::rng_from(seed::seed_from_u64(11));
        let w = DlogWindow::new(-50_000, 70_000).unwrap();
        for size in [1u64, 7, 347, 5000, 200_000] {
            let table = BabyStepTable::new(&g, w, size).unwrap();
            for _ in 0..10 {
                let e: i64 = rng.gen_range(-50_000..=70_000);
                let target = g.pow_signed(g.generator(), e);
                assert_eq!(table.solve(&target).unwrap(), e);
            }
            let outside = g.pow_signed(g.generator(), 70_001);
            assert!(table.solve(&outside).is_err());
        }
    }

    #[test]
    fn amortized_sizes() {
        let w = DlogWindow::new(0, (1 << 20) - 1).unwrap();
        assert_eq!(BabyStepTable::balanced_size(&w), 1 << 10);
        assert_eq!(BabyStepTable::amortized_size(&w, 4, 1 << 30), 1 << 11);
        assert_eq!(BabyStepTable::amortized_size(&w, 1 << 20, 1 << 12), 1 << 12);
        let tiny = DlogWindow::new(0, 3).unwrap();
        assert_eq!(BabyStepTable::amortized_size(&tiny, 1000, 1 << 20), 4);
    }
}
