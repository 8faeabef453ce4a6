//! Packed radix-|A| words.
//!
//! A word `a_0 a_1 ... a_{l-1}` over an alphabet of size `radix` is packed as
//! `sum_i a_i * radix^(l-1-i)`, so the first symbol is most significant and
//! numeric order equals lexicographic order.

use crate::error::{Error, Result};
use crate::Symbol;

/// `radix^len`, or an error when it does not fit in a `u64`.
pub fn word_count(radix: usize, len: usize) -> Result<u64> {
    let mut total: u64 = 1;
    for _ in 0..len {
        total = total
            .checked_mul(radix as u64)
            .ok_or_else(|| Error::InvalidBlock(format!("{radix}^{len} words do not fit in 64 bits")))?;
    }
    Ok(total)
}

pub fn pack(symbols: &[Symbol], radix: usize) -> u64 {
    symbols.iter().fold(0u64, |acc, &s| acc * radix as u64 + s as u64)
}

/// Writes the `out.len()` symbols of `word` into `out`.
pub fn unpack_into(mut word: u64, radix: usize, out: &mut [Symbol]) {
    for slot in out.iter_mut().rev() {
        *slot = (word % radix as u64) as Symbol;
        word /= radix as u64;
    }
}

pub fn unpack(word: u64, radix: usize, len: usize) -> Vec<Symbol> {
    let mut out = vec![0; len];
    unpack_into(word, radix, &mut out);
    out
}
