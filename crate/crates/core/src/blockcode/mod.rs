//! Length-`l` block codes stored as explicit tables, and the exact
//! per-block expected distortion `d̄_l(a^l, C_l)`.

mod format;

pub use format::{parse_codes, write_codes};

use crate::error::{Error, Result};
use crate::model::SystemSpec;
use crate::word;
use crate::Symbol;

/// Encoder table `X^l -> {0..M-1}` plus one decoder table
/// `{0..M-1} x Y_j^l -> Z̃_j^l` per decoder.
///
/// Decoder `j` stores its reconstructions row-major: row
/// `m * |Y_j|^l + pack(y^l)` holds `l` reconstruction symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockCode {
    pub(crate) block_len: usize,
    pub(crate) codewords: usize,
    pub(crate) source_size: usize,
    pub(crate) side_sizes: Vec<usize>,
    pub(crate) recon_sizes: Vec<usize>,
    pub(crate) enc: Vec<usize>,
    pub(crate) dec: Vec<Vec<Symbol>>,
}

impl BlockCode {
    pub fn new(
        block_len: usize,
        codewords: usize,
        source_size: usize,
        side_sizes: Vec<usize>,
        recon_sizes: Vec<usize>,
        enc: Vec<usize>,
        dec: Vec<Vec<Symbol>>,
    ) -> Result<Self> {
        if block_len == 0 {
            return Err(Error::InvalidCode("block length must be positive".into()));
        }
        if codewords == 0 {
            return Err(Error::InvalidCode("need at least one codeword".into()));
        }
        if side_sizes.is_empty() || side_sizes.len() != recon_sizes.len() || dec.len() != side_sizes.len() {
            return Err(Error::InvalidCode("decoder count disagrees across tables".into()));
        }
        let inputs = word::word_count(source_size, block_len)? as usize;
        if enc.len() != inputs {
            return Err(Error::InvalidCode(format!(
                "encoder table has {} rows, expected {inputs}",
                enc.len()
            )));
        }
        if let Some(&m) = enc.iter().find(|&&m| m >= codewords) {
            return Err(Error::InvalidCode(format!("encoder emits {m} but M = {codewords}")));
        }
        for (j, table) in dec.iter().enumerate() {
            let rows = codewords * word::word_count(side_sizes[j], block_len)? as usize;
            if table.len() != rows * block_len {
                return Err(Error::InvalidCode(format!(
                    "decoder {j} table has {} symbols, expected {}",
                    table.len(),
                    rows * block_len
                )));
            }
            if let Some(&z) = table.iter().find(|&&z| z >= recon_sizes[j]) {
                return Err(Error::SymbolOutOfAlphabet {
                    symbol: z,
                    size: recon_sizes[j],
                });
            }
        }
        Ok(Self {
            block_len,
            codewords,
            source_size,
            side_sizes,
            recon_sizes,
            enc,
            dec,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn codewords(&self) -> usize {
        self.codewords
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn decoder_count(&self) -> usize {
        self.dec.len()
    }

    pub fn side_sizes(&self) -> &[usize] {
        &self.side_sizes
    }

    pub fn recon_sizes(&self) -> &[usize] {
        &self.recon_sizes
    }

    pub fn encoder_table(&self) -> &[usize] {
        &self.enc
    }

    pub fn decoder_table(&self, j: usize) -> &[Symbol] {
        &self.dec[j]
    }

    /// Whether this code uses the alphabets of `spec`.
    pub fn fits(&self, spec: &SystemSpec) -> bool {
        self.source_size == spec.source_size()
            && self.side_sizes == spec.side_sizes()
            && self.recon_sizes == spec.recon_sizes()
    }

    pub(crate) fn check_fits(&self, spec: &SystemSpec) -> Result<()> {
        if self.fits(spec) {
            Ok(())
        } else {
            Err(Error::InvalidCode("code alphabets do not match the system".into()))
        }
    }

    /// Class membership for a budget: `M <= max_codewords`.
    pub fn within_budget(&self, max_codewords: usize) -> bool {
        self.codewords <= max_codewords
    }

    /// Encoder lookup by packed word.
    pub fn encode_word(&self, word: u64) -> usize {
        self.enc[word as usize]
    }

    pub fn encode_block(&self, block: &[Symbol]) -> Result<usize> {
        if block.len() != self.block_len {
            return Err(Error::LengthMismatch {
                expected: self.block_len,
                actual: block.len(),
            });
        }
        if let Some(&symbol) = block.iter().find(|&&s| s >= self.source_size) {
            return Err(Error::SymbolOutOfAlphabet {
                symbol,
                size: self.source_size,
            });
        }
        Ok(self.encode_word(word::pack(block, self.source_size)))
    }

    /// Reconstruction for codeword `m` and packed side word; no checks.
    pub fn reconstruction(&self, j: usize, m: usize, side_word: u64) -> &[Symbol] {
        let rows_per_codeword = word::word_count(self.side_sizes[j], self.block_len).unwrap_or(1);
        let row = m as u64 * rows_per_codeword + side_word;
        let start = row as usize * self.block_len;
        &self.dec[j][start..start + self.block_len]
    }

    pub fn decode_block(&self, j: usize, m: usize, side: &[Symbol]) -> Result<Vec<Symbol>> {
        if j >= self.dec.len() {
            return Err(Error::DecoderOutOfRange {
                index: j,
                count: self.dec.len(),
            });
        }
        if m >= self.codewords {
            return Err(Error::InvalidCode(format!("codeword {m} >= M = {}", self.codewords)));
        }
        if side.len() != self.block_len {
            return Err(Error::LengthMismatch {
                expected: self.block_len,
                actual: side.len(),
            });
        }
        let radix = self.side_sizes[j];
        if let Some(&symbol) = side.iter().find(|&&s| s >= radix) {
            return Err(Error::SymbolOutOfAlphabet { symbol, size: radix });
        }
        Ok(self.reconstruction(j, m, word::pack(side, radix)).to_vec())
    }
}

/// Exact `d̄_l^{(j)}(a^l, C)` when the encoder output is forced to `m`.
///
/// Enumerates only `Y_j^l`: the target is averaged out per position through
/// `E[d(zt, Z) | x_i, y_i]`.
pub(crate) fn distortion_for_codeword(
    spec: &SystemSpec,
    code: &BlockCode,
    j: usize,
    block: &[Symbol],
    m: usize,
) -> f64 {
    let marginal = spec.marginal_channel(j).expect("decoder index checked");
    let l = block.len();
    let radix = marginal.side_size();
    let side_words = word::word_count(radix, l).expect("validated code");
    let mut ys = vec![0; l];
    let mut total = 0.0;
    for yw in 0..side_words {
        word::unpack_into(yw, radix, &mut ys);
        let mut weight = 1.0;
        for (&a, &y) in block.iter().zip(&ys) {
            weight *= marginal.side_prob(a, y);
            if weight == 0.0 {
                break;
            }
        }
        if weight == 0.0 {
            continue;
        }
        let recon = code.reconstruction(j, m, yw);
        let cost: f64 = (0..l).map(|i| marginal.expected_cost(block[i], ys[i], recon[i])).sum();
        total += weight * cost;
    }
    total / l as f64
}

/// `d̄_l^{(j)}(a^l, C)`: expected per-letter distortion at decoder `j` given
/// the source block, over the channel alone.
pub fn expected_block_distortion(spec: &SystemSpec, code: &BlockCode, j: usize, block: &[Symbol]) -> Result<f64> {
    code.check_fits(spec)?;
    spec.decoder(j)?;
    let m = code.encode_block(block)?;
    Ok(distortion_for_codeword(spec, code, j, block, m))
}

/// `sum_a pmf(a) d̄_l^{(j)}(a, C)`, the expected distortion of the code under
/// a block law `pmf` indexed by packed word.
pub fn expected_code_distortion(spec: &SystemSpec, code: &BlockCode, j: usize, pmf: &[f64]) -> Result<f64> {
    code.check_fits(spec)?;
    spec.decoder(j)?;
    check_block_pmf(pmf, code.enc.len())?;
    let mut block = vec![0; code.block_len];
    let mut total = 0.0;
    for (w, &p) in pmf.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        word::unpack_into(w as u64, code.source_size, &mut block);
        total += p * distortion_for_codeword(spec, code, j, &block, code.enc[w]);
    }
    Ok(total)
}

pub(crate) fn check_block_pmf(pmf: &[f64], size: usize) -> Result<()> {
    if pmf.len() != size {
        return Err(Error::InvalidPmf(format!("{} entries, expected {size}", pmf.len())));
    }
    if let Some(bad) = pmf.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidPmf(format!("entry {bad} outside [0, 1]")));
    }
    let sum: f64 = pmf.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidPmf(format!("sums to {sum}")));
    }
    Ok(())
}

/// `d̄_l^{(j)}(a, C)` for every decoder and every packed word `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDistortionTable {
    values: Vec<Vec<f64>>,
}

impl BlockDistortionTable {
    pub fn compute(spec: &SystemSpec, code: &BlockCode) -> Result<Self> {
        code.check_fits(spec)?;
        let mut block = vec![0; code.block_len];
        let values = (0..spec.decoder_count())
            .map(|j| {
                (0..code.enc.len())
                    .map(|w| {
                        word::unpack_into(w as u64, code.source_size, &mut block);
                        distortion_for_codeword(spec, code, j, &block, code.enc[w])
                    })
                    .collect()
            })
            .collect();
        Ok(Self { values })
    }

    /// Values for decoder `j`, indexed by packed word.
    pub fn decoder(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    pub fn get(&self, j: usize, word: u64) -> f64 {
        self.values[j][word as usize]
    }
}
