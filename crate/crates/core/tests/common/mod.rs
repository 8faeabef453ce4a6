#![allow(dead_code)]

use multiterm::blockcode::BlockCode;
use multiterm::model::{DecoderSpec, SourceModel, SystemSpec};
use multiterm::word;
use rand::Rng;

pub fn random_pmf<R: Rng>(size: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..size).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// A dense random system with up to `max_j` decoders and small alphabets.
pub fn random_spec<R: Rng>(rng: &mut R, max_j: usize) -> SystemSpec {
    let source_size = rng.random_range(2..=3);
    let j_count = rng.random_range(1..=max_j);
    let decoders: Vec<DecoderSpec> = (0..j_count)
        .map(|_| {
            let side = rng.random_range(1..=3);
            let target = rng.random_range(2..=3);
            let recon = rng.random_range(2..=3);
            let table = (0..recon * target).map(|_| rng.random::<f64>()).collect();
            DecoderSpec::new(side, target, recon, table, None)
        })
        .collect();
    let joint: usize = decoders.iter().map(|d| d.side_size * d.target_size).product();
    let w = (0..source_size).map(|_| random_pmf(joint, rng)).collect();
    SystemSpec::new(source_size, decoders, w).expect("random spec is valid")
}

pub fn random_code<R: Rng>(spec: &SystemSpec, l: usize, m: usize, rng: &mut R) -> BlockCode {
    let inputs = word::word_count(spec.source_size(), l).unwrap() as usize;
    let enc = (0..inputs).map(|_| rng.random_range(0..m)).collect();
    let dec = spec
        .decoders()
        .iter()
        .map(|d| {
            let rows = m * word::word_count(d.side_size, l).unwrap() as usize;
            (0..rows * l).map(|_| rng.random_range(0..d.recon_size)).collect()
        })
        .collect();
    BlockCode::new(
        l,
        m,
        spec.source_size(),
        spec.side_sizes(),
        spec.recon_sizes(),
        enc,
        dec,
    )
    .unwrap()
}

pub fn random_sequence<R: Rng>(n: usize, radix: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..radix)).collect()
}

/// The three sources of the universality checks over a binary alphabet.
pub fn ergodic_sources() -> Vec<(&'static str, SourceModel)> {
    vec![
        ("iid", SourceModel::iid(vec![0.7, 0.3]).unwrap()),
        (
            "markov",
            SourceModel::markov(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap(),
        ),
        (
            "function_of_markov",
            SourceModel::function_of_markov(
                vec![vec![0.8, 0.2, 0.0], vec![0.0, 0.7, 0.3], vec![0.4, 0.0, 0.6]],
                vec![0, 1, 1],
                2,
            )
            .unwrap(),
        ),
    ]
}

/// Sample mean and its standard error.
pub fn mean_and_sigma(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
