use alloc::vec::Vec;

use crate::{Error, Result};

/// `trunc(10^delta * w)`, truncating the decimal digits of `w` as printed
/// (the shortest representation that reads back to the same `f64`).
pub fn encode(w: f64, delta: u32) -> Result<i64> {
    if !w.is_finite() {
        return Err(Error::NonFinite(0));
    }
    if delta > 18 {
        return Err(Error::invalid("delta too large"));
    }
    let text = alloc::format!("{}", w.abs());
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    let too_large = || Error::invalid("value too large to encode");
    let mut v: i64 = 0;
    let digits = int
        .bytes()
        .chain(frac.bytes().chain(core::iter::repeat(b'0')).take(delta as usize));
    for d in digits {
        v = v
            .checked_mul(10)
            .and_then(|v| v.checked_add(i64::from(d - b'0')))
            .ok_or_else(too_large)?;
    }
    Ok(if w < 0.0 { -v } else { v })
}

/// Encodes every entry, rejecting non-finite values and `|w| > bound`.
pub fn encode_vector(w: &[f64], delta: u32, bound: f64) -> Result<Vec<i64>> {
    w.iter()
        .enumerate()
        .map(|(index, &v)| {
            if !v.is_finite() {
                return Err(Error::NonFinite(index));
            }
            if v.abs() > bound {
                return Err(Error::BoundViolation {
                    index,
                    bound: alloc::format!("{bound}"),
                });
            }
            encode(v, delta)
        })
        .collect()
}

pub fn mask(x: &[i64], gamma: u64) -> Vec<i64> {
    x.iter().map(|&v| v + gamma as i64).collect()
}

/// `r - n gamma` for every entry.
pub fn unmask(r: &[i64], gamma: u64, clients: usize) -> Vec<i64> {
    let shift = gamma as i64 * clients as i64;
    r.iter().map(|&v| v - shift).collect()
}

/// `m / 10^delta`.
pub fn decode(m: i64, delta: u32) -> f64 {
    m as f64 / 10i64.pow(delta) as f64
}

/// `m / (10^delta n)`.
pub fn decode_mean(m: i64, delta: u32, clients: usize) -> f64 {
    m as f64 / (10i64.pow(delta) as f64 * clients as f64)
}
