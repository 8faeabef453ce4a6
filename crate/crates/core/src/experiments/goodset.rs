//! Monte Carlo estimates of the probability that the encoder declares an
//! error, with an exact binomial-tail oracle where one exists.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::factorial::ln_binomial;

use super::trials::trial_seed;
use crate::blockcode::expected_code_distortion;
use crate::error::{Error, Result};
use crate::model::SourceModel;
use crate::seeds;
use crate::universal::{Codec, SELECTION_TOL};
use crate::word;

#[derive(Debug, Clone, PartialEq)]
pub struct GoodSetPoint {
    pub n: usize,
    pub trials: usize,
    pub errors: usize,
    /// Estimate of the error-declaration probability.
    pub fraction: f64,
    /// Exact error-declaration probability, when computable.
    pub oracle: Option<f64>,
}

impl GoodSetPoint {
    /// Binomial standard deviation of `fraction` around the oracle.
    pub fn oracle_sigma(&self) -> Option<f64> {
        self.oracle.map(|p| (p * (1.0 - p) / self.trials as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodSetReport {
    pub epsilon: f64,
    pub points: Vec<GoodSetPoint>,
    /// `(l, code index)` of the code the achievability premise is checked on.
    pub designated: (usize, usize),
    /// `E[d^{(j)}]` of the designated code under the true block law.
    pub designated_distortion: Vec<f64>,
    /// Whether `E[d^{(j)}] <= Δ_j + ε` for every `j`.
    pub premise_holds: bool,
    /// `f^{(j)}(a) = d̄_l^{(j)}(a) - Δ_j - ε`, indexed `[j][packed word]`.
    pub excess: Vec<Vec<f64>>,
}

/// `E[d^{(j)}]` of catalog code `(l, c)` under the law of `source`.
fn premise_distortions(codec: &Codec<'_>, source: &SourceModel, l: usize, c: usize) -> Result<Vec<f64>> {
    let code = codec.catalog().code(l, c)?;
    let pmf = source.block_pmf(l)?;
    (0..codec.spec().decoder_count())
        .map(|j| expected_code_distortion(codec.spec(), code, j, &pmf))
        .collect()
}

/// The catalog code with the smallest worst normalized premise margin.
pub fn best_premise_code(codec: &Codec<'_>, source: &SourceModel) -> Result<(usize, usize)> {
    let config = codec.config();
    let d_max: Vec<f64> = codec.spec().decoders().iter().map(|d| d.d_max).collect();
    let mut best: Option<(f64, (usize, usize))> = None;
    for l in 1..=codec.l_limit() {
        for c in 0..codec.catalog().slot(l)?.len() {
            let dist = premise_distortions(codec, source, l, c)?;
            let margin = dist
                .iter()
                .enumerate()
                .map(|(j, &d)| (d - config.targets[j] - config.epsilon) / d_max[j].max(f64::MIN_POSITIVE))
                .fold(f64::NEG_INFINITY, f64::max);
            if best.is_none_or(|(b, _)| margin < b) {
                best = Some((margin, (l, c)));
            }
        }
    }
    best.map(|(_, lc)| lc).ok_or(Error::EmptyCatalogSlot(1))
}

/// `P(lo + (hi - lo) K / n > threshold)` for `K ~ Binomial(n, q)`.
pub fn binomial_tail_oracle(n: usize, q: f64, lo: f64, hi: f64, threshold: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..=n {
        let avg = ((n - k) as f64 * lo + k as f64 * hi) / n as f64;
        if avg <= threshold {
            continue;
        }
        let log_p = if q == 0.0 {
            if k == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else if q == 1.0 {
            if k == n {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            ln_binomial(n as u64, k as u64) + k as f64 * q.ln() + (n - k) as f64 * (1.0 - q).ln()
        };
        total += log_p.exp();
    }
    total.min(1.0)
}

/// Exact error probability when the good-set test reduces to a binomial
/// count: one decoder, an i.i.d. source, only block length 1 searchable,
/// a single code whose per-letter table takes at most two values.
fn exact_error_probability(codec: &Codec<'_>, source: &SourceModel, n: usize) -> Result<Option<f64>> {
    let SourceModel::Iid { pmf } = source else {
        return Ok(None);
    };
    if codec.spec().decoder_count() != 1 || codec.effective_window(n)? != 1 || codec.catalog().slot(1)?.len() != 1 {
        return Ok(None);
    }
    let values = codec.table(1, 0)?.decoder(0);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.iter().any(|&v| v != lo && v != hi) {
        return Ok(None);
    }
    let q: f64 = values
        .iter()
        .zip(pmf)
        .filter(|(&v, _)| v == hi && hi != lo)
        .map(|(_, &p)| p)
        .sum();
    let threshold = codec.config().threshold(0) + SELECTION_TOL;
    Ok(Some(binomial_tail_oracle(n, q, lo, hi, threshold)))
}

/// For each `n` in `n_grid`, the fraction of `trials` sampled sequences on
/// which the encoder declares an error.
pub fn estimate_good_set_probability(
    codec: &Codec<'_>,
    source: &SourceModel,
    n_grid: &[usize],
    trials: usize,
    seed: u64,
    designated: Option<(usize, usize)>,
) -> Result<GoodSetReport> {
    let config = codec.config();
    let designated = match designated {
        Some(lc) => lc,
        None => best_premise_code(codec, source)?,
    };
    let designated_distortion = premise_distortions(codec, source, designated.0, designated.1)?;
    let premise_holds = designated_distortion
        .iter()
        .enumerate()
        .all(|(j, &d)| d <= config.targets[j] + config.epsilon);
    let table = codec.table(designated.0, designated.1)?;
    let words = word::word_count(codec.spec().source_size(), designated.0)? as usize;
    let excess = (0..codec.spec().decoder_count())
        .map(|j| {
            (0..words)
                .map(|w| table.get(j, w as u64) - config.targets[j] - config.epsilon)
                .collect()
        })
        .collect();

    let mut points = Vec::with_capacity(n_grid.len());
    for (g, &n) in n_grid.iter().enumerate() {
        let grid_seed = seeds::derive(seed, &[g as u64, n as u64]);
        let flags = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(grid_seed, t));
                let x = source.sample(n, &mut rng)?;
                Ok(codec.select_plan(&x)?.error_declared)
            })
            .collect::<Result<Vec<bool>>>()?;
        let errors = flags.iter().filter(|&&e| e).count();
        points.push(GoodSetPoint {
            n,
            trials,
            errors,
            fraction: if trials == 0 {
                0.0
            } else {
                errors as f64 / trials as f64
            },
            oracle: exact_error_probability(codec, source, n)?,
        });
    }
    Ok(GoodSetReport {
        epsilon: config.epsilon,
        points,
        designated,
        designated_distortion,
        premise_holds,
        excess,
    })
}
