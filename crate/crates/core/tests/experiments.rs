mod common;

use std::path::Path;

use multiterm::blockcode::{expected_code_distortion, write_codes, BlockCode};
use multiterm::catalog::{build_catalog, CatalogDescriptor, CatalogMode};
use multiterm::experiments::presets::{bsc_side_spec, xor_code};
use multiterm::experiments::{
    binomial_tail_oracle, estimate_good_set_probability, run_trials, scenario_preset, write_goodset_csv,
    write_trials_csv, Experiment, Scenario,
};
use multiterm::model::{DecoderSpec, SourceModel, SystemSpec};
use multiterm::universal::{Codec, CodecConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn no_side_spec() -> SystemSpec {
    SystemSpec::from_kernel(2, vec![DecoderSpec::hamming(1, 2)], |x| vec![(vec![0], vec![x], 1.0)]).unwrap()
}

fn constant_zero() -> BlockCode {
    BlockCode::new(1, 1, 2, vec![1], vec![2], vec![0, 0], vec![vec![0]]).unwrap()
}

fn injected(codes: Vec<BlockCode>, l_max: usize) -> CatalogDescriptor {
    CatalogDescriptor {
        l_max,
        mode: CatalogMode::Injected,
        injected: codes,
    }
}

#[test]
fn channel_draws_follow_the_joint_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let spec = common::random_spec(&mut rng, 2);
        let x = rng.random_range(0..spec.source_size());
        let row = spec.channel_row(x).to_vec();
        let draws = 20_000;
        let mut counts = vec![0usize; row.len()];
        let seq = vec![x; draws];
        let draw = spec.sample_channel(&seq, &mut rng).unwrap();
        let radices: Vec<usize> = spec
            .decoders()
            .iter()
            .map(|d| d.side_size)
            .chain(spec.decoders().iter().map(|d| d.target_size))
            .collect();
        for i in 0..draws {
            let digits = draw.side.iter().map(|s| s[i]).chain(draw.target.iter().map(|t| t[i]));
            let joint = digits.zip(&radices).fold(0, |acc, (d, r)| acc * r + d);
            counts[joint] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&row)
            .map(|(&c, &p)| (c as f64 - draws as f64 * p).powi(2) / (draws as f64 * p))
            .sum();
        let df = (row.len() - 1) as f64;
        let critical = ChiSquared::new(df).unwrap().inverse_cdf(0.9999);
        assert!(stat < critical, "chi2 {stat} >= {critical} (df {df})");
    }
}

#[test]
fn relabeling_the_source_leaves_distortion_unchanged() {
    // X' = 1 - X with the channel and the encoder relabeled to match.
    let base = bsc_side_spec(0.2).unwrap();
    let flipped = SystemSpec::from_kernel(2, vec![DecoderSpec::hamming(2, 2)], |x| {
        let x = 1 - x;
        vec![(vec![x], vec![x], 0.8), (vec![1 - x], vec![x], 0.2)]
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let code = common::random_code(&base, 2, 2, &mut rng);
        let enc: Vec<usize> = (0..4).map(|w| code.encode_word(3 - w)).collect();
        let relabeled = BlockCode::new(2, 2, 2, vec![2], vec![2], enc, vec![code.decoder_table(0).to_vec()]).unwrap();
        let pmf = common::random_pmf(4, &mut rng);
        let reversed: Vec<f64> = pmf.iter().rev().copied().collect();
        let a = expected_code_distortion(&base, &code, 0, &pmf).unwrap();
        let b = expected_code_distortion(&flipped, &relabeled, 0, &reversed).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn complementary_delivery_is_lossless() {
    let preset = scenario_preset(&Scenario::ComplementaryDelivery { rho: 0.1 }).unwrap();
    let config = CodecConfig::new(&preset.spec, 1.0, 0.1, vec![0.0, 0.0], Some(1)).unwrap();
    let catalog = build_catalog(&preset.spec, config.budget(), injected(vec![xor_code()], 1)).unwrap();
    let codec = Codec::new(&preset.spec, &config, &catalog).unwrap();
    let summary = run_trials(&codec, &preset.source, 1024, 100, 1).unwrap();
    assert_eq!(summary.distortion[0].mean, 0.0);
    assert_eq!(summary.distortion[1].mean, 0.0);
    // single slot, single code, k_eff = 1: no header, exactly n payload bits
    assert_eq!(summary.rate.mean, 1.0);
    assert_eq!(summary.error_fraction, 0.0);

    let report = estimate_good_set_probability(&codec, &preset.source, &[16, 256], 50, 2, None).unwrap();
    assert!(report.premise_holds);
    assert!(report.points.iter().all(|p| p.fraction == 0.0));
}

#[test]
fn complementary_rate_counts_the_header() {
    let preset = scenario_preset(&Scenario::ComplementaryDelivery { rho: 0.1 }).unwrap();
    let config = CodecConfig::new(&preset.spec, 1.0, 0.1, vec![0.0, 0.0], Some(2)).unwrap();
    let catalog = build_catalog(&preset.spec, config.budget(), preset.catalog.clone()).unwrap();
    let codec = Codec::new(&preset.spec, &config, &catalog).unwrap();
    let summary = run_trials(&codec, &preset.source, 1024, 20, 3).unwrap();
    let index_bits = catalog.index_width(1).unwrap();
    assert!(summary.reports.iter().all(|r| r.block_len == 1 && r.code_index == 0));
    assert_eq!(summary.rate.mean, (1024 + 2 + index_bits) as f64 / 1024.0);
    assert_eq!(summary.distortion[0].mean + summary.distortion[1].mean, 0.0);
}

#[test]
fn noiseless_side_information_is_copied() {
    let spec = bsc_side_spec(0.0).unwrap();
    let config = CodecConfig::new(&spec, 0.0, 0.1, vec![0.0], Some(1)).unwrap();
    let copy = BlockCode::new(1, 1, 2, vec![2], vec![2], vec![0, 0], vec![vec![0, 1]]).unwrap();
    let catalog = build_catalog(&spec, config.budget(), injected(vec![copy], 1)).unwrap();
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let source = SourceModel::iid(vec![0.5, 0.5]).unwrap();
    let summary = run_trials(&codec, &source, 512, 20, 4).unwrap();
    assert!(summary.reports.iter().all(|r| r.distortion[0] == 0.0 && r.bits == 0));
}

#[test]
fn constant_code_distortion_tracks_the_source_mean() {
    let spec = no_side_spec();
    let config = CodecConfig::new(&spec, 0.0, 0.3, vec![0.3], Some(1)).unwrap();
    let catalog = build_catalog(&spec, config.budget(), injected(vec![constant_zero()], 1)).unwrap();
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let source = SourceModel::iid(vec![0.7, 0.3]).unwrap();
    let summary = run_trials(&codec, &source, 4096, 200, 5).unwrap();
    let d = summary.distortion[0];
    assert!((d.mean - 0.3).abs() <= d.half_width * 4.0 / 1.96, "{d:?}");
    for r in &summary.reports {
        assert_eq!(r.distortion[0], r.exact_distortion[0]);
    }
}

#[test]
fn good_set_oracle_at_epsilon_one_twentieth() {
    // δ = 0.3 gives ε = 0.3 / (4 + 2) = 0.05 and threshold 0.3 + 4·0.05 = 0.5.
    let spec = no_side_spec();
    let config = CodecConfig::new(&spec, 0.0, 0.3, vec![0.3], Some(1)).unwrap();
    assert!((config.epsilon - 0.05).abs() < 1e-15);
    let catalog = build_catalog(&spec, config.budget(), injected(vec![constant_zero()], 1)).unwrap();
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let source = SourceModel::iid(vec![0.7, 0.3]).unwrap();
    let report = estimate_good_set_probability(&codec, &source, &[1000], 2000, 6, None).unwrap();
    let point = &report.points[0];
    let oracle = point.oracle.unwrap();
    let direct = binomial_tail_oracle(1000, 0.3, 0.0, 1.0, 0.5 + 1e-12);
    assert_eq!(oracle, direct);
    assert!(oracle < 1e-30);
    assert!((point.fraction - oracle).abs() <= 4.0 * point.oracle_sigma().unwrap());
    assert_eq!(report.excess[0], vec![0.0 - 0.3 - 0.05, 1.0 - 0.3 - 0.05]);
}

#[test]
fn good_set_premise_failure_is_reported() {
    let spec = no_side_spec();
    let config = CodecConfig::new(&spec, 0.0, 0.06, vec![0.1], Some(1)).unwrap();
    let catalog = build_catalog(&spec, config.budget(), injected(vec![constant_zero()], 1)).unwrap();
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let source = SourceModel::iid(vec![0.7, 0.3]).unwrap();
    let report = estimate_good_set_probability(&codec, &source, &[256], 200, 7, None).unwrap();
    assert!(!report.premise_holds);
    assert!(report.points[0].fraction > 0.9);
}

#[test]
fn every_preset_meets_its_premise() {
    for scenario in Scenario::all_defaults() {
        let preset = scenario_preset(&scenario).unwrap();
        let c = &preset.codec;
        let config = CodecConfig::new(&preset.spec, c.rate, c.delta, c.targets.clone(), c.l_cap).unwrap();
        let catalog = build_catalog(&preset.spec, config.budget(), preset.catalog.clone()).unwrap();
        let codec = Codec::new(&preset.spec, &config, &catalog).unwrap();
        let report = estimate_good_set_probability(&codec, &preset.source, &[], 0, 0, None).unwrap();
        assert!(
            report.premise_holds,
            "{}: {:?}",
            preset.name, report.designated_distortion
        );
    }
}

#[test]
fn trials_are_reproducible_and_order_independent() {
    let preset = scenario_preset(&Scenario::WynerZiv { p_side: 0.1 }).unwrap();
    let c = &preset.codec;
    let config = CodecConfig::new(&preset.spec, c.rate, c.delta, c.targets.clone(), c.l_cap).unwrap();
    let catalog = build_catalog(&preset.spec, config.budget(), preset.catalog.clone()).unwrap();
    let codec = Codec::new(&preset.spec, &config, &catalog).unwrap();
    let a = run_trials(&codec, &preset.source, 300, 12, 99).unwrap();
    let b = run_trials(&codec, &preset.source, 300, 12, 99).unwrap();
    assert_eq!(a.reports, b.reports);
    let single = multiterm::experiments::run_trial(&codec, &preset.source, 300, 7, a.reports[7].seed).unwrap();
    assert_eq!(single, a.reports[7]);
}

#[test]
fn experiment_files_load_with_code_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("xor.codes"), write_codes(&[xor_code()])).unwrap();
    let config = r#"
name = "cd"
[scenario]
preset = "complementary_delivery(0.2)"
[codec]
l_cap = 1
[catalog]
mode = "injected"
l_max = 1
codes = ["xor.codes"]
"#;
    let path = dir.path().join("cd.toml");
    std::fs::write(&path, config).unwrap();
    let e = Experiment::load(&path).unwrap();
    let catalog = e.build_catalog().unwrap();
    // the preset's own XOR code and the file's copy collapse to one
    assert_eq!(catalog.slot(1).unwrap(), &[xor_code()]);
    let codec = e.codec(&catalog).unwrap();
    let summary = run_trials(&codec, &e.source, 64, 5, 1).unwrap();
    assert_eq!(summary.distortion[0].mean, 0.0);

    let missing = config.replace("xor.codes", "absent.codes");
    assert!(Experiment::from_toml(&missing, dir.path()).is_err());
    assert!(Experiment::from_toml(config, Path::new("/nonexistent")).is_err());
}

#[test]
fn csv_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let preset = scenario_preset(&Scenario::SideInfoMaybeAbsent { p_side: 0.1 }).unwrap();
    let c = &preset.codec;
    let config = CodecConfig::new(&preset.spec, c.rate, c.delta, c.targets.clone(), c.l_cap).unwrap();
    let catalog = build_catalog(&preset.spec, config.budget(), preset.catalog.clone()).unwrap();
    let codec = Codec::new(&preset.spec, &config, &catalog).unwrap();
    let summary = run_trials(&codec, &preset.source, 128, 3, 8).unwrap();
    let write = |name: &str| {
        let path = dir.path().join(name);
        write_trials_csv(std::fs::File::create(&path).unwrap(), &preset.name, 2, &summary.reports).unwrap();
        std::fs::read(&path).unwrap()
    };
    let first = write("a.csv");
    assert_eq!(first, write("b.csv"));
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("scenario,n,seed,rate,distortion_1,distortion_2,error_declared,l,s,code_index\n"));

    let report = estimate_good_set_probability(&codec, &preset.source, &[64, 128], 10, 9, None).unwrap();
    let mut buf = Vec::new();
    write_goodset_csv(&mut buf, &preset.name, &report).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
}
