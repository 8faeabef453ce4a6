//! The probabilistic system: alphabets, the known memoryless channel `W`,
//! per-decoder distortion measures, and the (codec-invisible) source models.
//!
//! Decoders are indexed `0..J` and sequence positions `0..n` throughout; the
//! 1-based indices of the usual notation are shifted down by one everywhere.

mod source;

pub use source::SourceModel;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;

use crate::error::{Error, Result};
use crate::Symbol;

/// Row sums and stochastic invariants are checked to this tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Alphabets and distortion measure seen by one decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderSpec {
    /// |Y_j|; a singleton means the decoder has no side information.
    pub side_size: usize,
    /// |Z_j|, the alphabet of the target the decoder estimates.
    pub target_size: usize,
    /// |Z̃_j|, the reconstruction alphabet.
    pub recon_size: usize,
    /// Row-major `recon_size x target_size` table of d_1(zt, z).
    pub distortion: Vec<f64>,
    pub d_max: f64,
}

impl DecoderSpec {
    /// Distortion table given explicitly; `d_max` defaults to the largest entry.
    pub fn new(
        side_size: usize,
        target_size: usize,
        recon_size: usize,
        distortion: Vec<f64>,
        d_max: Option<f64>,
    ) -> Self {
        let d_max = d_max.unwrap_or_else(|| distortion.iter().copied().fold(0.0, f64::max));
        Self {
            side_size,
            target_size,
            recon_size,
            distortion,
            d_max,
        }
    }

    /// Hamming distortion with the reconstruction alphabet equal to the target's.
    pub fn hamming(side_size: usize, target_size: usize) -> Self {
        let mut table = vec![1.0; target_size * target_size];
        for z in 0..target_size {
            table[z * target_size + z] = 0.0;
        }
        Self::new(side_size, target_size, target_size, table, Some(1.0))
    }

    pub fn distortion(&self, recon: Symbol, target: Symbol) -> f64 {
        self.distortion[recon * self.target_size + target]
    }
}

/// One output of `W`: side-information letters and target letters for every
/// decoder, together with its probability.
pub type ChannelOutcome = (Vec<Symbol>, Vec<Symbol>, f64);

/// J, every alphabet, the transition probability `W(y_J, z_J | x)` and the
/// distortion measures.
///
/// `W` is stored densely: row `x` is indexed by the joint output
/// `(y_1, .., y_J, z_1, .., z_J)` packed mixed-radix with `y_1` most
/// significant.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    source_size: usize,
    decoders: Vec<DecoderSpec>,
    w: Vec<Vec<f64>>,
    d_max_global: f64,
    marginals: Vec<MarginalChannel>,
}

impl SystemSpec {
    pub fn new(source_size: usize, decoders: Vec<DecoderSpec>, w: Vec<Vec<f64>>) -> Result<Self> {
        if source_size == 0 {
            return Err(Error::InvalidSpec("source alphabet is empty".into()));
        }
        if decoders.is_empty() {
            return Err(Error::InvalidSpec("need at least one decoder".into()));
        }
        for (j, d) in decoders.iter().enumerate() {
            if d.side_size == 0 || d.target_size == 0 || d.recon_size == 0 {
                return Err(Error::InvalidSpec(format!("decoder {j} has an empty alphabet")));
            }
            if d.distortion.len() != d.recon_size * d.target_size {
                return Err(Error::InvalidSpec(format!(
                    "decoder {j}: distortion table has {} entries, expected {}",
                    d.distortion.len(),
                    d.recon_size * d.target_size
                )));
            }
            if !d.d_max.is_finite() || d.d_max < 0.0 {
                return Err(Error::InvalidSpec(format!("decoder {j}: d_max must be finite")));
            }
            if let Some(bad) = d.distortion.iter().find(|&&v| !(0.0..=d.d_max).contains(&v)) {
                return Err(Error::InvalidSpec(format!(
                    "decoder {j}: distortion entry {bad} outside [0, {}]",
                    d.d_max
                )));
            }
        }
        let joint: usize = decoders.iter().map(|d| d.side_size * d.target_size).product();
        if w.len() != source_size {
            return Err(Error::InvalidSpec(format!(
                "channel has {} rows, source alphabet has {source_size} letters",
                w.len()
            )));
        }
        for (x, row) in w.iter().enumerate() {
            if row.len() != joint {
                return Err(Error::InvalidSpec(format!(
                    "channel row {x} has {} entries, expected {joint}",
                    row.len()
                )));
            }
            check_pmf(row).map_err(|e| Error::InvalidSpec(format!("channel row {x}: {e}")))?;
        }
        let d_max_global = decoders.iter().map(|d| d.d_max).fold(0.0, f64::max);
        let mut spec = Self {
            source_size,
            decoders,
            w,
            d_max_global,
            marginals: Vec::new(),
        };
        spec.marginals = (0..spec.decoders.len())
            .map(|j| MarginalChannel::from_spec(&spec, j))
            .collect();
        Ok(spec)
    }

    /// Builds `W` from a kernel listing the outcomes of each source letter.
    /// Repeated outcomes accumulate.
    pub fn from_kernel<F>(source_size: usize, decoders: Vec<DecoderSpec>, kernel: F) -> Result<Self>
    where
        F: Fn(Symbol) -> Vec<ChannelOutcome>,
    {
        let layout = JointLayout::new(&decoders);
        let mut w = vec![vec![0.0; layout.size()]; source_size];
        for (x, row) in w.iter_mut().enumerate() {
            for (ys, zs, p) in kernel(x) {
                let idx = layout.index(&decoders, &ys, &zs)?;
                row[idx] += p;
            }
        }
        Self::new(source_size, decoders, w)
    }

    pub fn decoder_count(&self) -> usize {
        self.decoders.len()
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn decoders(&self) -> &[DecoderSpec] {
        &self.decoders
    }

    pub fn decoder(&self, j: usize) -> Result<&DecoderSpec> {
        self.decoders.get(j).ok_or(Error::DecoderOutOfRange {
            index: j,
            count: self.decoders.len(),
        })
    }

    pub fn channel_row(&self, x: Symbol) -> &[f64] {
        &self.w[x]
    }

    /// D_max, the largest per-decoder distortion ceiling.
    pub fn d_max_global(&self) -> f64 {
        self.d_max_global
    }

    pub fn side_sizes(&self) -> Vec<usize> {
        self.decoders.iter().map(|d| d.side_size).collect()
    }

    pub fn recon_sizes(&self) -> Vec<usize> {
        self.decoders.iter().map(|d| d.recon_size).collect()
    }

    /// Channel from `X` to `(Y_j, Z_j)` with every other component summed out.
    pub fn marginal_channel(&self, j: usize) -> Result<&MarginalChannel> {
        self.marginals.get(j).ok_or(Error::DecoderOutOfRange {
            index: j,
            count: self.decoders.len(),
        })
    }

    /// Splits a packed joint output into `(y_J, z_J)`.
    pub fn split_joint(&self, mut joint: usize) -> (Vec<Symbol>, Vec<Symbol>) {
        let j_count = self.decoders.len();
        let mut zs = vec![0; j_count];
        let mut ys = vec![0; j_count];
        for j in (0..j_count).rev() {
            let size = self.decoders[j].target_size;
            zs[j] = joint % size;
            joint /= size;
        }
        for j in (0..j_count).rev() {
            let size = self.decoders[j].side_size;
            ys[j] = joint % size;
            joint /= size;
        }
        (ys, zs)
    }

    fn check_symbols(&self, x: &[Symbol]) -> Result<()> {
        match x.iter().find(|&&s| s >= self.source_size) {
            Some(&symbol) => Err(Error::SymbolOutOfAlphabet {
                symbol,
                size: self.source_size,
            }),
            None => Ok(()),
        }
    }

    /// Passes `x` through the n-th extension of `W`, position by position.
    pub fn sample_channel<R: Rng + ?Sized>(&self, x: &[Symbol], rng: &mut R) -> Result<ChannelDraw> {
        self.check_symbols(x)?;
        let rows: Vec<WeightedIndex<f64>> = self
            .w
            .iter()
            .map(|row| WeightedIndex::new(row).expect("validated channel row"))
            .collect();
        let j_count = self.decoders.len();
        let mut side = vec![Vec::with_capacity(x.len()); j_count];
        let mut target = vec![Vec::with_capacity(x.len()); j_count];
        for &xi in x {
            let (ys, zs) = self.split_joint(rows[xi].sample(rng));
            for j in 0..j_count {
                side[j].push(ys[j]);
                target[j].push(zs[j]);
            }
        }
        Ok(ChannelDraw { side, target })
    }

    /// Per-letter average distortion `(1/n) sum_i d_1(zt_i, z_i)` for decoder `j`.
    pub fn block_distortion(&self, j: usize, recon: &[Symbol], target: &[Symbol]) -> Result<f64> {
        let dec = self.decoder(j)?;
        if recon.len() != target.len() {
            return Err(Error::LengthMismatch {
                expected: recon.len(),
                actual: target.len(),
            });
        }
        if recon.is_empty() {
            return Err(Error::InvalidBlock("empty sequence".into()));
        }
        let mut total = 0.0;
        for (&zt, &z) in recon.iter().zip(target) {
            if zt >= dec.recon_size {
                return Err(Error::SymbolOutOfAlphabet {
                    symbol: zt,
                    size: dec.recon_size,
                });
            }
            if z >= dec.target_size {
                return Err(Error::SymbolOutOfAlphabet {
                    symbol: z,
                    size: dec.target_size,
                });
            }
            total += dec.distortion(zt, z);
        }
        Ok(total / recon.len() as f64)
    }
}

struct JointLayout {
    size: usize,
}

impl JointLayout {
    fn new(decoders: &[DecoderSpec]) -> Self {
        Self {
            size: decoders.iter().map(|d| d.side_size * d.target_size).product(),
        }
    }

    fn size(&self) -> usize {
        self.size
    }

    fn index(&self, decoders: &[DecoderSpec], ys: &[Symbol], zs: &[Symbol]) -> Result<usize> {
        if ys.len() != decoders.len() || zs.len() != decoders.len() {
            return Err(Error::InvalidSpec("channel outcome has wrong arity".into()));
        }
        let mut idx = 0;
        for (d, &y) in decoders.iter().zip(ys) {
            if y >= d.side_size {
                return Err(Error::SymbolOutOfAlphabet {
                    symbol: y,
                    size: d.side_size,
                });
            }
            idx = idx * d.side_size + y;
        }
        for (d, &z) in decoders.iter().zip(zs) {
            if z >= d.target_size {
                return Err(Error::SymbolOutOfAlphabet {
                    symbol: z,
                    size: d.target_size,
                });
            }
            idx = idx * d.target_size + z;
        }
        Ok(idx)
    }
}

/// Side information and targets produced by one pass through `W^n`,
/// indexed `[j][i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelDraw {
    pub side: Vec<Vec<Symbol>>,
    pub target: Vec<Vec<Symbol>>,
}

/// `P(y_j, z_j | x)` for one decoder, plus the per-letter quantities the
/// exact distortion computations need.
#[derive(Debug, Clone)]
pub struct MarginalChannel {
    pub j: usize,
    side_size: usize,
    target_size: usize,
    recon_size: usize,
    /// `[x][y * |Z_j| + z]`
    table: Vec<Vec<f64>>,
    /// `[x][y]`, P(y | x)
    side: Vec<Vec<f64>>,
    /// `[(x * |Y| + y) * |Z̃| + zt]`, E[d_1(zt, Z) | x, y]; zero where P(y|x) = 0.
    cond_cost: Vec<f64>,
    /// `[x * |Z̃| + zt]`, E[d_1(zt, Z) | x]
    letter_cost: Vec<f64>,
}

impl MarginalChannel {
    fn from_spec(spec: &SystemSpec, j: usize) -> Self {
        let dec = &spec.decoders[j];
        let (ys_n, zs_n, zt_n) = (dec.side_size, dec.target_size, dec.recon_size);
        let mut table = vec![vec![0.0; ys_n * zs_n]; spec.source_size];
        for (x, row) in spec.w.iter().enumerate() {
            for (joint, &p) in row.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let (ys, zs) = spec.split_joint(joint);
                table[x][ys[j] * zs_n + zs[j]] += p;
            }
        }
        let side: Vec<Vec<f64>> = table
            .iter()
            .map(|row| (0..ys_n).map(|y| row[y * zs_n..(y + 1) * zs_n].iter().sum()).collect())
            .collect();
        let mut cond_cost = vec![0.0; spec.source_size * ys_n * zt_n];
        let mut letter_cost = vec![0.0; spec.source_size * zt_n];
        for x in 0..spec.source_size {
            for y in 0..ys_n {
                let py = side[x][y];
                for zt in 0..zt_n {
                    let joint_cost: f64 = (0..zs_n).map(|z| table[x][y * zs_n + z] * dec.distortion(zt, z)).sum();
                    letter_cost[x * zt_n + zt] += joint_cost;
                    if py > 0.0 {
                        cond_cost[(x * ys_n + y) * zt_n + zt] = joint_cost / py;
                    }
                }
            }
        }
        Self {
            j,
            side_size: ys_n,
            target_size: zs_n,
            recon_size: zt_n,
            table,
            side,
            cond_cost,
            letter_cost,
        }
    }

    pub fn side_size(&self) -> usize {
        self.side_size
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn row(&self, x: Symbol) -> &[f64] {
        &self.table[x]
    }

    pub fn prob(&self, x: Symbol, y: Symbol, z: Symbol) -> f64 {
        self.table[x][y * self.target_size + z]
    }

    pub fn side_prob(&self, x: Symbol, y: Symbol) -> f64 {
        self.side[x][y]
    }

    /// E[d_1(zt, Z_j) | X = x, Y_j = y].
    pub fn expected_cost(&self, x: Symbol, y: Symbol, zt: Symbol) -> f64 {
        self.cond_cost[(x * self.side_size + y) * self.recon_size + zt]
    }

    /// E[d_1(zt, Z_j) | X = x], the cost of a reconstruction that ignores side information.
    pub fn letter_cost(&self, x: Symbol, zt: Symbol) -> f64 {
        self.letter_cost[x * self.recon_size + zt]
    }
}

pub(crate) fn check_pmf(p: &[f64]) -> std::result::Result<(), String> {
    if p.is_empty() {
        return Err("empty distribution".into());
    }
    if let Some(bad) = p.iter().find(|&&v| !(0.0..=1.0).contains(&v)) {
        return Err(format!("probability {bad} outside [0, 1]"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(format!("sums to {sum}"));
    }
    Ok(())
}
