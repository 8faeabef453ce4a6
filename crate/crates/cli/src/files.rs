use std::path::Path;

use anyhow::{bail, Context, Result};
use multiterm::universal::Bitstream;
use multiterm::Symbol;

/// Bitstream files: the bit length as 8 little-endian bytes, then the
/// packed bytes MSB-first.
pub fn write_bits(path: &Path, bits: &Bitstream) -> Result<()> {
    let mut out = (bits.len() as u64).to_le_bytes().to_vec();
    out.extend_from_slice(bits.as_bytes());
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn read_bits(path: &Path) -> Result<Bitstream> {
    let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if raw.len() < 8 {
        bail!("{}: not a bitstream file", path.display());
    }
    let (len, bytes) = raw.split_at(8);
    let len = u64::from_le_bytes(len.try_into().expect("8 bytes")) as usize;
    if bytes.len() != len.div_ceil(8) {
        bail!("{}: {} payload bytes for {len} bits", path.display(), bytes.len());
    }
    Ok(Bitstream::from_bytes(bytes.to_vec(), len)?)
}

/// Sequence files hold whitespace-separated symbol indices.
pub fn write_sequence(path: &Path, seq: &[Symbol]) -> Result<()> {
    let mut text = String::with_capacity(seq.len() * 2);
    for (i, s) in seq.iter().enumerate() {
        if i > 0 {
            text.push(if i % 64 == 0 { '\n' } else { ' ' });
        }
        text.push_str(&s.to_string());
    }
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_sequence(path: &Path) -> Result<Vec<Symbol>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.split_whitespace()
        .map(|t| {
            t.parse::<Symbol>()
                .with_context(|| format!("{}: bad symbol {t:?}", path.display()))
        })
        .collect()
}
