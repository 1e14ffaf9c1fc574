//! Fixed-width integer encodings used for wire formats and size accounting.

use alloc::vec::Vec;
use num_bigint::BigUint;

use crate::{Error, Result};

/// Big-endian, left-padded to `width` bytes.
pub fn write_be(v: &BigUint, width: usize, out: &mut Vec<u8>) {
    let raw = v.to_bytes_be();
    debug_assert!(raw.len() <= width || (raw.len() == 1 && raw[0] == 0));
    let raw: &[u8] = if raw == [0] { &[] } else { &raw };
    out.extend(core::iter::repeat_n(0u8, width - raw.len()));
    out.extend_from_slice(raw);
}

/// Little-endian, right-padded to `width` bytes.
pub fn write_le(v: &BigUint, width: usize, out: &mut Vec<u8>) {
    let raw = v.to_bytes_le();
    let raw: &[u8] = if raw == [0] { &[] } else { &raw };
    debug_assert!(raw.len() <= width);
    out.extend_from_slice(raw);
    out.extend(core::iter::repeat_n(0u8, width - raw.len()));
}

/// Sequential reader over a byte slice.
#[derive(Debug)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    pub fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&end| end <= self.buf.len())
            .ok_or(Error::Malformed("truncated input"))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32_be(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn i64_le(&mut self) -> Result<i64> {
        let b = self.take(8)?;
        let mut a = [0u8; 8];
        a.copy_from_slice(b);
        Ok(i64::from_le_bytes(a))
    }

    pub fn be(&mut self, width: usize) -> Result<BigUint> {
        Ok(BigUint::from_bytes_be(self.take(width)?))
    }

    pub fn le(&mut self, width: usize) -> Result<BigUint> {
        Ok(BigUint::from_bytes_le(self.take(width)?))
    }
}

/// Writes an integer vector: a one-byte kind followed by a `u32` length.
/// Vectors with entries in `{0, 1}` are packed one bit per entry.
pub fn write_small_vector(y: &[i64], out: &mut Vec<u8>) {
    let binary = y.iter().all(|&v| v == 0 || v == 1);
    out.push(if binary { 0 } else { 1 });
    out.extend_from_slice(&(y.len() as u32).to_be_bytes());
    if binary {
        for chunk in y.chunks(8) {
            let byte = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &v)| acc | ((v as u8) << i));
            out.push(byte);
        }
    } else {
        for v in y {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
}

pub fn read_small_vector(r: &mut Reader<'_>) -> Result<Vec<i64>> {
    let kind = r.u8()?;
    let len = r.u32_be()? as usize;
    match kind {
        0 => {
            let packed = r.take(len.div_ceil(8))?;
            Ok((0..len).map(|i| i64::from((packed[i / 8] >> (i % 8)) & 1)).collect())
        }
        1 => (0..len).map(|_| r.i64_le()).collect(),
        _ => Err(Error::Malformed("unknown vector kind")),
    }
}
