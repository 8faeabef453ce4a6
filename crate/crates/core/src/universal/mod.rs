//! The universal code: good-set test and plan selection, bit-exact
//! serialization, and per-decoder reconstruction.
//!
//! The encoder sees only `x^n`, the system (`W` and the distortion
//! measures), the codec configuration and the shared catalog. No source law
//! enters any signature here.
//!
//! # Bitstream layout
//!
//! Fields are concatenated in this order, each most significant bit first:
//!
//! | field        | width                                   |
//! |--------------|-----------------------------------------|
//! | `l - 1`      | `w = ceil(log2 k_eff)` (0 if `k_eff = 1`) |
//! | `s`          | `w`                                     |
//! | code index   | `ceil(log2 |slot l|)` (0 for one code)  |
//! | payload      | `ceil(B log2 M)` (0 if `M = 1`)         |
//!
//! where `k_eff = min(floor(log2 log2 n), l_cap, catalog l_max)`,
//! `B = floor((n - s) / l)`, and the payload is the codeword sequence
//! `m_0 .. m_{B-1}` read as one base-`M` integer with `m_0` most
//! significant. The error flag is not transmitted.

pub mod bitstream;

pub use bitstream::{BitReader, Bitstream};

use rayon::prelude::*;

use crate::blockcode::BlockDistortionTable;
use crate::catalog::{index_width, Budget, CodeCatalog};
use crate::empirical::{self, block_count};
use crate::error::{Error, Result};
use crate::model::SystemSpec;
use crate::word;
use crate::Symbol;

/// Slack allowed on the selection inequality to absorb summation rounding.
pub const SELECTION_TOL: f64 = 1e-12;

/// `(R, δ, Δ_J)` and the derived `ε = δ / (4J + 2 D_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodecConfig {
    pub rate: f64,
    pub delta: f64,
    pub targets: Vec<f64>,
    pub epsilon: f64,
    /// Extra cap on the block length beyond `k_n`.
    pub l_cap: Option<usize>,
}

impl CodecConfig {
    pub fn new(spec: &SystemSpec, rate: f64, delta: f64, targets: Vec<f64>, l_cap: Option<usize>) -> Result<Self> {
        let j = spec.decoder_count();
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidConfig(format!("rate {rate} must be nonnegative")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidConfig(format!("slack {delta} must be positive")));
        }
        if targets.len() != j {
            return Err(Error::InvalidConfig(format!(
                "{} distortion targets for {j} decoders",
                targets.len()
            )));
        }
        if targets.iter().any(|&d| !(d >= 0.0 && d.is_finite())) {
            return Err(Error::InvalidConfig("distortion targets must be nonnegative".into()));
        }
        if l_cap == Some(0) {
            return Err(Error::InvalidConfig("l_cap must be positive".into()));
        }
        let epsilon = delta / (4.0 * j as f64 + 2.0 * spec.d_max_global());
        Ok(Self {
            rate,
            delta,
            targets,
            epsilon,
            l_cap,
        })
    }

    pub fn budget(&self) -> Budget {
        Budget {
            rate: self.rate,
            epsilon: self.epsilon,
        }
    }

    /// `Δ_j + 4 J ε`, the per-decoder threshold of the good-set test.
    pub fn threshold(&self, j: usize) -> f64 {
        self.targets[j] + 4.0 * self.targets.len() as f64 * self.epsilon
    }
}

/// `k_n = max(1, floor(log2 log2 n))`, computed exactly as the largest `k`
/// with `2^(2^k) <= n`.
pub fn window_cap(n: usize) -> Result<usize> {
    if n < 4 {
        return Err(Error::SequenceTooShort(n));
    }
    let log_n = (usize::BITS - 1 - n.leading_zeros()) as usize; // floor(log2 n)
    let k = (usize::BITS - 1 - log_n.leading_zeros()) as usize; // floor(log2 floor(log2 n))
    Ok(k.max(1))
}

/// The encoder's choice for one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodePlan {
    pub block_len: usize,
    pub shift: usize,
    pub code_index: usize,
    /// `x^n` is outside the good set; the fallback plan was serialized.
    pub error_declared: bool,
    /// `sum_a q_{l;s}(a) d̄_l^{(j)}(a) - Δ_j` per decoder for this plan.
    pub slack: Vec<f64>,
}

/// Bit counts of the four fields for one plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub field_width: usize,
    pub index_bits: usize,
    pub blocks: usize,
    pub payload_bits: usize,
}

impl Layout {
    pub fn total(&self) -> usize {
        2 * self.field_width + self.index_bits + self.payload_bits
    }
}

/// Encoder and decoders of the universal code over a fixed system,
/// configuration and catalog.
pub struct Codec<'a> {
    spec: &'a SystemSpec,
    config: &'a CodecConfig,
    catalog: &'a CodeCatalog,
    /// `tables[l - 1][code_index]`
    tables: Vec<Vec<BlockDistortionTable>>,
}

impl<'a> Codec<'a> {
    /// Precomputes `d̄_l` for every catalog code.
    pub fn new(spec: &'a SystemSpec, config: &'a CodecConfig, catalog: &'a CodeCatalog) -> Result<Self> {
        if config.targets.len() != spec.decoder_count() {
            return Err(Error::InvalidConfig("configuration does not match the system".into()));
        }
        if catalog.budget() != config.budget() {
            return Err(Error::InvalidConfig(
                "catalog budget differs from the codec's (R, ε)".into(),
            ));
        }
        let tables = (1..=catalog.l_max())
            .map(|l| {
                let codes = catalog.slot(l).unwrap_or(&[]);
                codes
                    .par_iter()
                    .map(|code| BlockDistortionTable::compute(spec, code))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec,
            config,
            catalog,
            tables,
        })
    }

    pub fn spec(&self) -> &SystemSpec {
        self.spec
    }

    pub fn config(&self) -> &CodecConfig {
        self.config
    }

    pub fn catalog(&self) -> &CodeCatalog {
        self.catalog
    }

    pub fn table(&self, l: usize, code_index: usize) -> Result<&BlockDistortionTable> {
        self.tables
            .get(l.wrapping_sub(1))
            .and_then(|slot| slot.get(code_index))
            .ok_or(Error::IndexOutOfCatalog {
                index: code_index,
                count: self.tables.get(l.wrapping_sub(1)).map_or(0, Vec::len),
            })
    }

    /// Largest block length the catalog and configuration allow.
    pub fn l_limit(&self) -> usize {
        let l_max = self.catalog.l_max();
        self.config.l_cap.map_or(l_max, |cap| cap.min(l_max))
    }

    /// `k_eff = min(k_n, l_limit)`.
    pub fn effective_window(&self, n: usize) -> Result<usize> {
        Ok(window_cap(n)?.min(self.l_limit()))
    }

    /// Width `w` of each of the `l - 1` and `s` fields.
    pub fn field_width(&self, n: usize) -> Result<usize> {
        Ok(index_width(self.effective_window(n)?))
    }

    pub fn layout(&self, n: usize, l: usize, s: usize, code_index: usize) -> Result<Layout> {
        let code = self.catalog.code(l, code_index)?;
        let blocks = block_count(n, l, s);
        Ok(Layout {
            field_width: self.field_width(n)?,
            index_bits: self.catalog.index_width(l)?,
            blocks,
            payload_bits: bitstream::radix_width(code.codewords(), blocks),
        })
    }

    /// Picks `(l, s, code)` passing `sum_a q_{l;s}(a) d̄_l^{(j)}(a) <= Δ_j + 4Jε`
    /// for every `j`, minimizing `max_j slack_j / d_max_j`; ties go to the
    /// smaller `l`, then `s`, then code index. Falls back to `(1, 0, 0)` with
    /// the error flag set when nothing qualifies.
    pub fn select_plan(&self, x: &[Symbol]) -> Result<EncodePlan> {
        let n = x.len();
        let k_eff = self.effective_window(n)?;
        let radix = self.spec.source_size();
        let j_count = self.spec.decoder_count();
        let d_max: Vec<f64> = self.spec.decoders().iter().map(|d| d.d_max).collect();

        let mut best: Option<(f64, EncodePlan)> = None;
        let mut fallback_slack = None;
        for l in 1..=k_eff {
            let tables = self
                .tables
                .get(l - 1)
                .filter(|t| !t.is_empty())
                .ok_or(Error::EmptyCatalogSlot(l))?;
            for s in 0..l {
                let q = empirical::nonoverlapping(x, radix, l, s)?;
                for (c, table) in tables.iter().enumerate() {
                    let slack: Vec<f64> = (0..j_count)
                        .map(|j| q.weighted_average(table.decoder(j)) - self.config.targets[j])
                        .collect();
                    if l == 1 && c == 0 {
                        fallback_slack = Some(slack.clone());
                    }
                    let qualifies = (0..j_count)
                        .all(|j| slack[j] + self.config.targets[j] <= self.config.threshold(j) + SELECTION_TOL);
                    if !qualifies {
                        continue;
                    }
                    let score = slack
                        .iter()
                        .zip(&d_max)
                        .map(|(&sl, &dm)| if dm > 0.0 { sl / dm } else { sl })
                        .fold(f64::NEG_INFINITY, f64::max);
                    if best.as_ref().is_none_or(|(b, _)| score < *b) {
                        best = Some((
                            score,
                            EncodePlan {
                                block_len: l,
                                shift: s,
                                code_index: c,
                                error_declared: false,
                                slack,
                            },
                        ));
                    }
                }
            }
        }
        Ok(match best {
            Some((_, plan)) => plan,
            None => EncodePlan {
                block_len: 1,
                shift: 0,
                code_index: 0,
                error_declared: true,
                slack: fallback_slack.expect("slot 1 is non-empty"),
            },
        })
    }

    /// Serializes `x^n` under `plan`.
    pub fn encode_with_plan(&self, x: &[Symbol], plan: &EncodePlan) -> Result<Bitstream> {
        let n = x.len();
        let (l, s) = (plan.block_len, plan.shift);
        let layout = self.layout(n, l, s, plan.code_index)?;
        let code = self.catalog.code(l, plan.code_index)?;
        let radix = self.spec.source_size();
        if let Some(&symbol) = x.iter().find(|&&v| v >= radix) {
            return Err(Error::SymbolOutOfAlphabet { symbol, size: radix });
        }
        let mut bits = Bitstream::new();
        bits.push_bits((l - 1) as u64, layout.field_width);
        bits.push_bits(s as u64, layout.field_width);
        bits.push_bits(plan.code_index as u64, layout.index_bits);
        let digits: Vec<usize> = x[s..s + layout.blocks * l]
            .chunks_exact(l)
            .map(|block| code.encode_word(word::pack(block, radix)))
            .collect();
        bitstream::push_radix(&mut bits, &digits, code.codewords());
        debug_assert_eq!(bits.len(), layout.total());
        Ok(bits)
    }

    pub fn encode(&self, x: &[Symbol]) -> Result<(Bitstream, EncodePlan)> {
        let plan = self.select_plan(x)?;
        let bits = self.encode_with_plan(x, &plan)?;
        Ok((bits, plan))
    }

    /// Reconstruction at decoder `j` from the stream and its own side
    /// information `y_j^n`; `n` is the side-information length. Positions
    /// outside the coded blocks get reconstruction symbol 0.
    pub fn decode(&self, j: usize, bits: &Bitstream, side: &[Symbol]) -> Result<Vec<Symbol>> {
        let n = side.len();
        let dec = self.spec.decoder(j)?;
        if let Some(&symbol) = side.iter().find(|&&v| v >= dec.side_size) {
            return Err(Error::SymbolOutOfAlphabet {
                symbol,
                size: dec.side_size,
            });
        }
        let k_eff = self.effective_window(n)?;
        let w = index_width(k_eff);
        let mut reader = BitReader::new(bits);
        let l = reader.read_bits(w)? as usize + 1;
        let s = reader.read_bits(w)? as usize;
        if l > k_eff || s >= l {
            return Err(Error::MalformedHeader(format!(
                "block length {l}, shift {s} with k_eff = {k_eff}"
            )));
        }
        let slot = self.catalog.slot(l)?;
        let index = reader.read_bits(index_width(slot.len()))? as usize;
        let code = slot.get(index).ok_or(Error::IndexOutOfCatalog {
            index,
            count: slot.len(),
        })?;
        let blocks = block_count(n, l, s);
        let codewords = bitstream::read_radix(&mut reader, code.codewords(), blocks)?;

        let mut out = vec![0; n];
        for (i, &m) in codewords.iter().enumerate() {
            let start = s + i * l;
            let y_word = word::pack(&side[start..start + l], dec.side_size);
            out[start..start + l].copy_from_slice(code.reconstruction(j, m, y_word));
        }
        Ok(out)
    }

    /// Exact `d̄_n^{(j)}(x^n, C̄_n)`: the expected distortion at decoder `j`
    /// given `x^n`, over the channel, for the code `plan` describes.
    pub fn exact_conditional_distortion(&self, x: &[Symbol], plan: &EncodePlan, j: usize) -> Result<f64> {
        let n = x.len();
        let (l, s) = (plan.block_len, plan.shift);
        let table = self.table(l, plan.code_index)?;
        let marginal = self.spec.marginal_channel(j)?;
        let radix = self.spec.source_size();
        let blocks = block_count(n, l, s);
        let covered = s..s + blocks * l;
        let mut total = 0.0;
        for block in x[covered.clone()].chunks_exact(l) {
            total += l as f64 * table.get(j, word::pack(block, radix));
        }
        for (i, &xi) in x.iter().enumerate() {
            if !covered.contains(&i) {
                total += marginal.letter_cost(xi, 0);
            }
        }
        Ok(total / n as f64)
    }

    /// `Δ_j + 4Jε + 2 k_n d_max^{(j)} / n`, the per-sequence bound on
    /// [`Self::exact_conditional_distortion`] for sequences in the good set.
    pub fn distortion_bound(&self, n: usize, j: usize) -> Result<f64> {
        let k_n = window_cap(n)?;
        Ok(self.config.threshold(j) + 2.0 * k_n as f64 * self.spec.decoder(j)?.d_max / n as f64)
    }

    /// Worst-case non-payload overhead in bits, over every `n`:
    /// `2 ceil(log2 l_limit) + max_l index width + 1` (the last bit covers
    /// payload rounding).
    pub fn max_overhead_bits(&self) -> usize {
        let index = (1..=self.l_limit())
            .filter_map(|l| self.catalog.index_width(l).ok())
            .max()
            .unwrap_or(0);
        2 * index_width(self.l_limit()) + index + 1
    }

    /// Smallest `n0 >= 4` past which `bits / n <= R + δ` holds for every
    /// input: total bits never exceed `n (R + ε) + max_overhead_bits`.
    pub fn rate_threshold(&self) -> usize {
        let headroom = self.config.delta - self.config.epsilon;
        let n0 = (self.max_overhead_bits() as f64 / headroom).ceil() as usize;
        n0.max(4)
    }
}

#[cfg(test)]
mod tests;
