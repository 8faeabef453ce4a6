//! The shared, deterministically ordered family of candidate block codes
//! known to the encoder and every decoder.
//!
//! For tiny parameters the catalog can be the literal class of all
//! length-`l` codes within the rate budget; otherwise it holds codes designed
//! by Lloyd-style alternation on configured training laws, plus any codes
//! injected from files.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::blockcode::{check_block_pmf, distortion_for_codeword, expected_code_distortion, BlockCode};
use crate::error::{Error, Result};
use crate::model::{SourceModel, SystemSpec};
use crate::seeds;
use crate::word;

/// Rate budget `(R, ε)`: a length-`l` code may use at most
/// `floor(2^{l (R + ε)})` codewords.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub rate: f64,
    pub epsilon: f64,
}

impl Budget {
    pub fn max_codewords(&self, l: usize) -> usize {
        let exponent = l as f64 * (self.rate + self.epsilon);
        if exponent >= 63.0 {
            return usize::MAX;
        }
        // absorb rounding in the exponent so exact powers of two are not lost
        (exponent.exp2() * (1.0 + 1e-12)).floor().max(1.0) as usize
    }
}

/// Bits needed to address `count` entries: `ceil(log2 count)`, 0 for one entry.
pub fn index_width(count: usize) -> usize {
    if count <= 1 {
        0
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    }
}

fn saturating_pow(base: u128, exp: u128) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc == u128::MAX || acc == 0 {
            break;
        }
    }
    acc
}

/// Size of the class of all length-`l` codes with exactly `codewords`
/// codewords: `M^{|X|^l} * prod_j (|Z̃_j|^l)^{M |Y_j|^l}`, saturating at
/// `u128::MAX`.
pub fn class_size(spec: &SystemSpec, l: usize, codewords: usize) -> u128 {
    let inputs = (spec.source_size() as u128).saturating_pow(l as u32);
    let mut count = saturating_pow(codewords as u128, inputs);
    for d in spec.decoders() {
        let cells = (codewords as u128)
            .saturating_mul((d.side_size as u128).saturating_pow(l as u32))
            .saturating_mul(l as u128);
        count = count.saturating_mul(saturating_pow(d.recon_size as u128, cells));
    }
    count
}

/// Every code of block length `l` with `M = floor(2^{l(R+ε)})` codewords,
/// in lexicographic order of (encoder table, decoder 1 table, ..., decoder J
/// table), each table read first entry most significant.
pub fn enumerate_codes(spec: &SystemSpec, l: usize, budget: Budget, limit: u128) -> Result<Vec<BlockCode>> {
    if l == 0 {
        return Err(Error::InvalidBlock("block length must be positive".into()));
    }
    let m = budget.max_codewords(l);
    let count = class_size(spec, l, m);
    if count > limit {
        return Err(Error::CountExceedsLimit { count, limit });
    }
    let inputs = word::word_count(spec.source_size(), l)? as usize;
    let mut radices = vec![m; inputs];
    let mut dec_lens = Vec::new();
    for d in spec.decoders() {
        let cells = m * word::word_count(d.side_size, l)? as usize * l;
        radices.extend(std::iter::repeat_n(d.recon_size, cells));
        dec_lens.push(cells);
    }
    let mut digits = vec![0usize; radices.len()];
    let mut codes = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let enc = digits[..inputs].to_vec();
        let mut offset = inputs;
        let dec = dec_lens
            .iter()
            .map(|&len| {
                let table = digits[offset..offset + len].to_vec();
                offset += len;
                table
            })
            .collect();
        codes.push(BlockCode::new(
            l,
            m,
            spec.source_size(),
            spec.side_sizes(),
            spec.recon_sizes(),
            enc,
            dec,
        )?);
        // odometer, last digit fastest
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(codes)
}

/// Output of [`design_code`].
#[derive(Debug, Clone)]
pub struct DesignedCode {
    pub code: BlockCode,
    /// Weighted objective `sum_j w_j E[d^{(j)}]` at the returned code.
    pub objective: f64,
    /// Objective at the seeded starting point, then after every iteration.
    pub history: Vec<f64>,
}

fn weighted_objective(spec: &SystemSpec, code: &BlockCode, pmf: &[f64], weights: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (j, &wj) in weights.iter().enumerate() {
        if wj != 0.0 {
            total += wj * expected_code_distortion(spec, code, j, pmf)?;
        }
    }
    Ok(total)
}

/// Lloyd-style alternation on the training law `training` over `X^l`.
///
/// Decoders start from seeded random tables. Each iteration first
/// reassigns every source word to its cheapest codeword under the current
/// decoders, then resets every decoder entry position-wise to the
/// reconstruction symbol of least posterior expected distortion given
/// `(m, y^l)`. All ties go to the lowest index. Stops when neither step
/// changes a table or after `iterations` rounds.
pub fn design_code(
    spec: &SystemSpec,
    l: usize,
    codewords: usize,
    training: &[f64],
    weights: &[f64],
    iterations: usize,
    seed: u64,
) -> Result<DesignedCode> {
    if l == 0 || codewords == 0 {
        return Err(Error::InvalidBlock(
            "block length and codeword count must be positive".into(),
        ));
    }
    let j_count = spec.decoder_count();
    if weights.len() != j_count || weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidConfig("need one nonnegative weight per decoder".into()));
    }
    let inputs = word::word_count(spec.source_size(), l)? as usize;
    check_block_pmf(training, inputs)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dec = Vec::with_capacity(j_count);
    for d in spec.decoders() {
        let cells = codewords * word::word_count(d.side_size, l)? as usize * l;
        dec.push((0..cells).map(|_| rng.random_range(0..d.recon_size)).collect());
    }
    let mut code = BlockCode::new(
        l,
        codewords,
        spec.source_size(),
        spec.side_sizes(),
        spec.recon_sizes(),
        vec![0; inputs],
        dec,
    )?;

    let mut history = vec![weighted_objective(spec, &code, training, weights)?];
    for _ in 0..iterations {
        let enc_changed = encoder_step(spec, &mut code, weights);
        let dec_changed = decoder_step(spec, &mut code, training);
        history.push(weighted_objective(spec, &code, training, weights)?);
        if !enc_changed && !dec_changed {
            break;
        }
    }
    let objective = *history.last().expect("history starts non-empty");
    Ok(DesignedCode {
        code,
        objective,
        history,
    })
}

fn encoder_step(spec: &SystemSpec, code: &mut BlockCode, weights: &[f64]) -> bool {
    let l = code.block_len;
    let mut block = vec![0; l];
    let mut changed = false;
    for w in 0..code.enc.len() {
        word::unpack_into(w as u64, code.source_size, &mut block);
        let mut best = (f64::INFINITY, 0);
        for m in 0..code.codewords {
            let cost: f64 = weights
                .iter()
                .enumerate()
                .filter(|(_, &wj)| wj != 0.0)
                .map(|(j, &wj)| wj * distortion_for_codeword(spec, code, j, &block, m))
                .sum();
            if cost < best.0 {
                best = (cost, m);
            }
        }
        if code.enc[w] != best.1 {
            code.enc[w] = best.1;
            changed = true;
        }
    }
    changed
}

fn decoder_step(spec: &SystemSpec, code: &mut BlockCode, training: &[f64]) -> bool {
    let l = code.block_len;
    let mut changed = false;
    let mut block = vec![0; l];
    let mut ys = vec![0; l];
    for j in 0..spec.decoder_count() {
        let marginal = spec.marginal_channel(j).expect("decoder in range");
        let radix = marginal.side_size();
        let recon = spec.decoders()[j].recon_size;
        let side_words = word::word_count(radix, l).expect("validated code") as usize;
        // acc[((m * |Y|^l + y) * l + i) * |Z̃| + zt]
        let mut acc = vec![0.0; code.codewords * side_words * l * recon];
        for (w, &p) in training.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            word::unpack_into(w as u64, code.source_size, &mut block);
            let m = code.enc[w];
            for yw in 0..side_words {
                word::unpack_into(yw as u64, radix, &mut ys);
                let weight = block
                    .iter()
                    .zip(&ys)
                    .fold(p, |acc, (&a, &y)| acc * marginal.side_prob(a, y));
                if weight == 0.0 {
                    continue;
                }
                let row = m * side_words + yw;
                for i in 0..l {
                    let base = (row * l + i) * recon;
                    for zt in 0..recon {
                        acc[base + zt] += weight * marginal.expected_cost(block[i], ys[i], zt);
                    }
                }
            }
        }
        for (cell, slot) in code.dec[j].iter_mut().enumerate() {
            let costs = &acc[cell * recon..(cell + 1) * recon];
            let mut best = 0;
            for zt in 1..recon {
                if costs[zt] < costs[best] {
                    best = zt;
                }
            }
            if *slot != best {
                *slot = best;
                changed = true;
            }
        }
    }
    changed
}

/// A law over `X^l` used only to design catalog codes.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainingPmf {
    Uniform,
    Model(SourceModel),
    /// Convex combination of model block laws; weights are normalized.
    Mixture(Vec<(f64, SourceModel)>),
}

impl TrainingPmf {
    pub fn block_pmf(&self, source_size: usize, l: usize) -> Result<Vec<f64>> {
        let size = word::word_count(source_size, l)? as usize;
        let check = |model: &SourceModel| {
            if model.source_size() == source_size {
                Ok(())
            } else {
                Err(Error::InvalidConfig(
                    "training model alphabet does not match the system".into(),
                ))
            }
        };
        match self {
            Self::Uniform => Ok(vec![1.0 / size as f64; size]),
            Self::Model(model) => {
                check(model)?;
                model.block_pmf(l)
            }
            Self::Mixture(parts) => {
                let total: f64 = parts.iter().map(|(w, _)| w).sum();
                if parts.is_empty()
                    || total.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
                    || parts.iter().any(|(w, _)| *w < 0.0)
                {
                    return Err(Error::InvalidConfig(
                        "mixture weights must be nonnegative with a positive sum".into(),
                    ));
                }
                let mut pmf = vec![0.0; size];
                for (w, model) in parts {
                    check(model)?;
                    for (slot, p) in pmf.iter_mut().zip(model.block_pmf(l)?) {
                        *slot += w / total * p;
                    }
                }
                Ok(pmf)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignParams {
    pub training: Vec<TrainingPmf>,
    /// Per-decoder objective weights; all ones when `None`.
    pub weights: Option<Vec<f64>>,
    /// Seeded starting points per (block length, training law).
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for DesignParams {
    fn default() -> Self {
        Self {
            training: vec![TrainingPmf::Uniform],
            weights: None,
            restarts: 2,
            iterations: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogMode {
    /// The literal class of all codes per slot; fails above `limit`.
    Enumerate {
        limit: u128,
    },
    Design(DesignParams),
    /// Only the injected codes.
    Injected,
}

/// Everything needed to rebuild a catalog bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogDescriptor {
    pub l_max: usize,
    pub mode: CatalogMode,
    /// Placed first in their slot, in the given order.
    pub injected: Vec<BlockCode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeCatalog {
    budget: Budget,
    slots: Vec<Vec<BlockCode>>,
    descriptor: CatalogDescriptor,
}

impl CodeCatalog {
    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn descriptor(&self) -> &CatalogDescriptor {
        &self.descriptor
    }

    pub fn l_max(&self) -> usize {
        self.slots.len()
    }

    /// Codes of block length `l` (1-based slot).
    pub fn slot(&self, l: usize) -> Result<&[BlockCode]> {
        match l.checked_sub(1).and_then(|i| self.slots.get(i)) {
            Some(codes) if !codes.is_empty() => Ok(codes),
            _ => Err(Error::EmptyCatalogSlot(l)),
        }
    }

    pub fn code(&self, l: usize, index: usize) -> Result<&BlockCode> {
        let slot = self.slot(l)?;
        slot.get(index).ok_or(Error::IndexOutOfCatalog {
            index,
            count: slot.len(),
        })
    }

    /// Width of the code-index field for slot `l`.
    pub fn index_width(&self, l: usize) -> Result<usize> {
        Ok(index_width(self.slot(l)?.len()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BlockCode)> {
        self.slots
            .iter()
            .enumerate()
            .flat_map(|(i, codes)| codes.iter().enumerate().map(move |(c, code)| (i + 1, c, code)))
    }

    pub fn len(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds the catalog for `spec` and `budget` from `descriptor`.
pub fn build_catalog(spec: &SystemSpec, budget: Budget, descriptor: CatalogDescriptor) -> Result<CodeCatalog> {
    if descriptor.l_max == 0 {
        return Err(Error::InvalidConfig("catalog l_max must be positive".into()));
    }
    let mut slots: Vec<Vec<BlockCode>> = vec![Vec::new(); descriptor.l_max];
    for code in &descriptor.injected {
        code.check_fits(spec)?;
        let l = code.block_len();
        if l > descriptor.l_max {
            return Err(Error::InvalidConfig(format!(
                "injected code of length {l} exceeds catalog l_max {}",
                descriptor.l_max
            )));
        }
        if !code.within_budget(budget.max_codewords(l)) {
            return Err(Error::InvalidConfig(format!(
                "injected code with M = {} exceeds the budget of {} codewords at l = {l}",
                code.codewords(),
                budget.max_codewords(l)
            )));
        }
        slots[l - 1].push(code.clone());
    }
    match &descriptor.mode {
        CatalogMode::Enumerate { limit } => {
            for l in 1..=descriptor.l_max {
                slots[l - 1].extend(enumerate_codes(spec, l, budget, *limit)?);
            }
        }
        CatalogMode::Design(params) => {
            let weights = params
                .weights
                .clone()
                .unwrap_or_else(|| vec![1.0; spec.decoder_count()]);
            let mut jobs = Vec::new();
            for l in 1..=descriptor.l_max {
                let inputs = word::word_count(spec.source_size(), l)? as usize;
                let m = budget.max_codewords(l).min(inputs);
                for (t, training) in params.training.iter().enumerate() {
                    let pmf = training.block_pmf(spec.source_size(), l)?;
                    for r in 0..params.restarts.max(1) {
                        let seed = seeds::derive(params.seed, &[l as u64, t as u64, r as u64]);
                        jobs.push((l, m, pmf.clone(), seed));
                    }
                }
            }
            let designed: Vec<Result<(usize, BlockCode)>> = jobs
                .par_iter()
                .map(|(l, m, pmf, seed)| {
                    design_code(spec, *l, *m, pmf, &weights, params.iterations, *seed).map(|d| (*l, d.code))
                })
                .collect();
            for item in designed {
                let (l, code) = item?;
                slots[l - 1].push(code);
            }
        }
        CatalogMode::Injected => {}
    }
    for slot in &mut slots {
        let mut seen = HashSet::new();
        slot.retain(|code| seen.insert(code.clone()));
    }
    Ok(CodeCatalog {
        budget,
        slots,
        descriptor,
    })
}
