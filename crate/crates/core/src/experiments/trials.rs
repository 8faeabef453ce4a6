use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::SourceModel;
use crate::seeds;
use crate::universal::Codec;

/// One Monte Carlo trial: sample `x^n`, encode, pass through `W^n`, decode
/// at every decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub trial: usize,
    pub n: usize,
    pub seed: u64,
    pub bits: usize,
    pub rate: f64,
    /// Realized `d_n^{(j)}` between reconstruction and target.
    pub distortion: Vec<f64>,
    /// `d̄_n^{(j)}(x^n, C̄_n)`.
    pub exact_distortion: Vec<f64>,
    /// `Δ_j + 4Jε + 2 k_n d_max^{(j)} / n`.
    pub bound: Vec<f64>,
    pub error_declared: bool,
    pub block_len: usize,
    pub shift: usize,
    pub code_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    /// Half-width of the normal-approximation 95% interval.
    pub half_width: f64,
}

impl MeanEstimate {
    pub fn from_samples(samples: impl Iterator<Item = f64> + Clone) -> Self {
        let count = samples.clone().count();
        if count == 0 {
            return Self {
                mean: f64::NAN,
                half_width: f64::NAN,
            };
        }
        let mean = samples.clone().sum::<f64>() / count as f64;
        let var = if count > 1 {
            samples.map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            half_width: 1.96 * (var / count as f64).sqrt(),
        }
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

#[derive(Debug, Clone)]
pub struct TrialSummary {
    pub reports: Vec<TrialReport>,
    pub rate: MeanEstimate,
    pub distortion: Vec<MeanEstimate>,
    pub exact_distortion: Vec<MeanEstimate>,
    pub error_fraction: f64,
}

impl TrialSummary {
    pub fn from_reports(reports: Vec<TrialReport>, decoders: usize) -> Self {
        let rate = MeanEstimate::from_samples(reports.iter().map(|r| r.rate));
        let distortion = (0..decoders)
            .map(|j| MeanEstimate::from_samples(reports.iter().map(move |r| r.distortion[j])))
            .collect();
        let exact_distortion = (0..decoders)
            .map(|j| MeanEstimate::from_samples(reports.iter().map(move |r| r.exact_distortion[j])))
            .collect();
        let errors = reports.iter().filter(|r| r.error_declared).count();
        let error_fraction = if reports.is_empty() {
            0.0
        } else {
            errors as f64 / reports.len() as f64
        };
        Self {
            reports,
            rate,
            distortion,
            exact_distortion,
            error_fraction,
        }
    }
}

/// Seed of trial `t`: `seeds::derive(master, [t])`.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    seeds::derive(master, &[trial as u64])
}

/// Runs one trial. The source model is used only to draw `x^n`; the codec
/// receives the sequence alone.
pub fn run_trial(codec: &Codec<'_>, source: &SourceModel, n: usize, trial: usize, seed: u64) -> Result<TrialReport> {
    let spec = codec.spec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = source.sample(n, &mut rng)?;
    let (bits, plan) = codec.encode(&x)?;
    let draw = spec.sample_channel(&x, &mut rng)?;
    let j_count = spec.decoder_count();
    let mut distortion = Vec::with_capacity(j_count);
    let mut exact_distortion = Vec::with_capacity(j_count);
    let mut bound = Vec::with_capacity(j_count);
    for j in 0..j_count {
        let zt = codec.decode(j, &bits, &draw.side[j])?;
        distortion.push(spec.block_distortion(j, &zt, &draw.target[j])?);
        exact_distortion.push(codec.exact_conditional_distortion(&x, &plan, j)?);
        bound.push(codec.distortion_bound(n, j)?);
    }
    Ok(TrialReport {
        trial,
        n,
        seed,
        bits: bits.len(),
        rate: bits.len() as f64 / n as f64,
        distortion,
        exact_distortion,
        bound,
        error_declared: plan.error_declared,
        block_len: plan.block_len,
        shift: plan.shift,
        code_index: plan.code_index,
    })
}

/// Independent trials over derived seeds, aggregated in trial order.
pub fn run_trials(codec: &Codec<'_>, source: &SourceModel, n: usize, trials: usize, seed: u64) -> Result<TrialSummary> {
    if n < 4 {
        return Err(Error::SequenceTooShort(n));
    }
    if source.source_size() != codec.spec().source_size() {
        return Err(Error::InvalidConfig("source alphabet does not match the system".into()));
    }
    let reports = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(codec, source, n, t, trial_seed(seed, t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialSummary::from_reports(reports, codec.spec().decoder_count()))
}
