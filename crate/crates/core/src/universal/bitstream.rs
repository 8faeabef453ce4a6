//! MSB-first bit vectors with fixed-width fields and radix-M packing.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bitstream {
    bytes: Vec<u8>,
    len: usize,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Takes the first `len` bits of `bytes`; trailing bits are cleared.
    pub fn from_bytes(mut bytes: Vec<u8>, len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::TruncatedBitstream {
                needed: len,
                available: bytes.len() * 8,
            });
        }
        bytes.truncate(len.div_ceil(8));
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xFFu8 << (8 - len % 8);
        }
        Ok(Self { bytes, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes, zero-padded to a whole byte.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bytes[i / 8] >> (7 - i % 8) & 1 == 1
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 1 << (7 - self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: usize) {
        debug_assert!(width == 64 || value >> width == 0);
        for shift in (0..width).rev() {
            self.push_bit(value >> shift & 1 == 1);
        }
    }

    /// Drops bits from the end.
    pub fn truncate(&mut self, len: usize) {
        if len < self.len {
            *self = Self::from_bytes(std::mem::take(&mut self.bytes), len).expect("shrinking");
        }
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.bit(i) { '1' } else { '0' }).collect()
    }
}

pub struct BitReader<'a> {
    bits: &'a Bitstream,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a Bitstream) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    fn ensure(&self, width: usize) -> Result<()> {
        if self.pos + width > self.bits.len() {
            Err(Error::TruncatedBitstream {
                needed: self.pos + width,
                available: self.bits.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn read_bits(&mut self, width: usize) -> Result<u64> {
        self.ensure(width)?;
        let mut value = 0u64;
        for _ in 0..width {
            value = value << 1 | self.bits.bit(self.pos) as u64;
            self.pos += 1;
        }
        Ok(value)
    }

    pub fn read_biguint(&mut self, width: usize) -> Result<BigUint> {
        self.ensure(width)?;
        let mut value = BigUint::zero();
        for _ in 0..width {
            value <<= 1u32;
            if self.bits.bit(self.pos) {
                value += 1u32;
            }
            self.pos += 1;
        }
        Ok(value)
    }
}

/// `ceil(count * log2 radix)`: the bits needed for any `count` digits in
/// base `radix`, i.e. the bit length of `radix^count - 1`.
pub fn radix_width(radix: usize, count: usize) -> usize {
    if radix <= 1 || count == 0 {
        return 0;
    }
    if radix.is_power_of_two() {
        return count * radix.trailing_zeros() as usize;
    }
    let top = BigUint::from(radix).pow(count as u32) - BigUint::one();
    top.bits() as usize
}

/// Packs `digits` (first most significant) as one base-`radix` integer in
/// exactly `radix_width(radix, digits.len())` bits.
pub fn push_radix(out: &mut Bitstream, digits: &[usize], radix: usize) {
    let width = radix_width(radix, digits.len());
    if width == 0 {
        return;
    }
    if radix.is_power_of_two() {
        let per = radix.trailing_zeros() as usize;
        for &d in digits {
            out.push_bits(d as u64, per);
        }
        return;
    }
    let mut value = BigUint::zero();
    for &d in digits {
        value = value * radix + d;
    }
    for i in (0..width as u64).rev() {
        out.push_bit(value.bit(i));
    }
}

/// Inverse of [`push_radix`].
pub fn read_radix(reader: &mut BitReader<'_>, radix: usize, count: usize) -> Result<Vec<usize>> {
    if radix <= 1 || count == 0 {
        return Ok(vec![0; count]);
    }
    let width = radix_width(radix, count);
    if radix.is_power_of_two() {
        let per = radix.trailing_zeros() as usize;
        return (0..count).map(|_| reader.read_bits(per).map(|v| v as usize)).collect();
    }
    let mut value = reader.read_biguint(width)?;
    if value >= BigUint::from(radix).pow(count as u32) {
        return Err(Error::MalformedHeader("payload exceeds radix range".into()));
    }
    let mut digits = vec![0; count];
    let big_radix = BigUint::from(radix);
    for slot in digits.iter_mut().rev() {
        let rem = &value % &big_radix;
        *slot = rem.iter_u64_digits().next().unwrap_or(0) as usize;
        value /= &big_radix;
    }
    Ok(digits)
}
