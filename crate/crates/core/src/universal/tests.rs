use super::*;
use crate::blockcode::fixtures::*;
use crate::blockcode::BlockCode;
use crate::catalog::{build_catalog, CatalogDescriptor, CatalogMode};
use crate::word;

fn catalog_of(spec: &SystemSpec, config: &CodecConfig, l_max: usize, codes: Vec<BlockCode>) -> CodeCatalog {
    let descriptor = CatalogDescriptor {
        l_max,
        mode: CatalogMode::Injected,
        injected: codes,
    };
    build_catalog(spec, config.budget(), descriptor).unwrap()
}

fn ones_sequence(n: usize, ones: usize) -> Vec<usize> {
    (0..n).map(|i| usize::from(i < ones)).collect()
}

#[test]
fn window_cap_values() {
    assert_eq!(window_cap(16).unwrap(), 2);
    assert_eq!(window_cap(256).unwrap(), 3);
    assert_eq!(window_cap(65536).unwrap(), 4);
    assert_eq!(window_cap(65535).unwrap(), 3);
    assert_eq!(window_cap(4).unwrap(), 1);
    assert_eq!(window_cap(15).unwrap(), 1);
    assert!(matches!(window_cap(3), Err(Error::SequenceTooShort(3))));
}

#[test]
fn epsilon_satisfies_slack_budget() {
    let spec = complementary();
    let config = CodecConfig::new(&spec, 1.0, 0.1, vec![0.0, 0.0], None).unwrap();
    let j = 2.0;
    assert!(4.0 * j * config.epsilon + 2.0 * config.epsilon * spec.d_max_global() <= config.delta + 1e-15);
    assert!(CodecConfig::new(&spec, 1.0, 0.0, vec![0.0, 0.0], None).is_err());
    assert!(CodecConfig::new(&spec, 1.0, 0.1, vec![0.0], None).is_err());
}

#[test]
fn xor_code_always_selected() {
    let spec = complementary();
    let config = CodecConfig::new(&spec, 1.0, 0.1, vec![0.0, 0.0], Some(1)).unwrap();
    let catalog = catalog_of(&spec, &config, 1, vec![constant_zero(&spec, 1), xor_code()]);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let x: Vec<usize> = (0..64).map(|i| (i * 5 + i / 3) % 4).collect();
    let plan = codec.select_plan(&x).unwrap();
    assert!(!plan.error_declared);
    assert_eq!((plan.block_len, plan.shift, plan.code_index), (1, 0, 1));
    assert_eq!(plan.slack, vec![0.0, 0.0]);
}

fn constant_codec_parts(delta: f64) -> (SystemSpec, CodecConfig) {
    let spec = no_side();
    let config = CodecConfig::new(&spec, 0.0, delta, vec![0.3], Some(1)).unwrap();
    (spec, config)
}

#[test]
fn good_set_test_with_constant_code() {
    let (spec, config) = constant_codec_parts(0.06);
    let catalog = catalog_of(&spec, &config, 1, vec![constant_zero(&spec, 1)]);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();

    let plan = codec.select_plan(&ones_sequence(100, 90)).unwrap();
    assert!(plan.error_declared);
    assert_eq!((plan.block_len, plan.shift, plan.code_index), (1, 0, 0));
    assert!((plan.slack[0] - 0.6).abs() < 1e-12);

    let plan = codec.select_plan(&ones_sequence(100, 20)).unwrap();
    assert!(!plan.error_declared);
    assert_eq!((plan.block_len, plan.shift, plan.code_index), (1, 0, 0));
    assert!((plan.slack[0] + 0.1).abs() < 1e-12);
}

#[test]
fn zero_width_stream() {
    let (spec, config) = constant_codec_parts(0.06);
    let catalog = catalog_of(&spec, &config, 1, vec![constant_zero(&spec, 1)]);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let x = ones_sequence(300, 10);
    let (bits, _) = codec.encode(&x).unwrap();
    assert_eq!(bits.len(), 0);
    let side = vec![0; 300];
    assert_eq!(codec.decode(0, &bits, &side).unwrap(), vec![0; 300]);
}

/// Eight distinct M = 4 codes at l = 2 over a binary source.
fn eight_codes(spec: &SystemSpec) -> Vec<BlockCode> {
    let perms = [
        [0, 1, 2, 3],
        [1, 0, 2, 3],
        [0, 2, 1, 3],
        [3, 1, 2, 0],
        [2, 3, 0, 1],
        [1, 2, 3, 0],
        [3, 2, 1, 0],
        [0, 3, 2, 1],
    ];
    perms
        .iter()
        .map(|perm| {
            let enc = perm.to_vec();
            let dec: Vec<usize> = (0..16)
                .flat_map(|row: usize| word::unpack((row % 4) as u64, 2, 2))
                .collect();
            BlockCode::new(2, 4, 2, spec.side_sizes(), spec.recon_sizes(), enc, vec![dec]).unwrap()
        })
        .collect()
}

#[test]
fn layout_arithmetic() {
    let spec = wyner_ziv(0.1);
    let config = CodecConfig::new(&spec, 1.0, 0.1, vec![0.1], None).unwrap();
    let mut codes = eight_codes(&spec);
    codes.push(constant_zero(&spec, 1));
    codes.push(constant_zero(&spec, 3));
    let catalog = catalog_of(&spec, &config, 3, codes);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let layout = codec.layout(256, 2, 1, 5).unwrap();
    // independent count: 2 fields of ceil(log2 3) bits, ceil(log2 8) index bits,
    // 127 blocks of log2 4 = 2 bits
    let blocks = (256 - 1) / 2;
    let expect = 2 * 2 + 3 + (blocks as f64 * 4f64.log2()).ceil() as usize;
    assert_eq!(layout.total(), expect);
    assert_eq!(expect, 261);

    let x: Vec<usize> = (0..256).map(|i| (i * 7 / 5) % 2).collect();
    let plan = EncodePlan {
        block_len: 2,
        shift: 1,
        code_index: 5,
        error_declared: false,
        slack: vec![0.0],
    };
    let bits = codec.encode_with_plan(&x, &plan).unwrap();
    assert_eq!(bits.len(), 261);
    // header: l - 1 = 1, s = 1, code 5
    assert_eq!(&bits.to_bit_string()[..7], "0101101");
    let decoded = codec.decode(0, &bits, &x).unwrap();
    // these decoders copy the side information, which here is x itself
    assert_eq!(&decoded[1..255], &x[1..255]);
    assert_eq!(decoded[0], 0);
    assert_eq!(decoded[255], 0);
}

#[test]
fn xor_round_trip_and_truncation() {
    let spec = complementary();
    let config = CodecConfig::new(&spec, 1.0, 0.1, vec![0.0, 0.0], Some(1)).unwrap();
    let catalog = catalog_of(&spec, &config, 1, vec![xor_code()]);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let x: Vec<usize> = (0..100).map(|i| (i * i + 3) % 4).collect();
    let x1: Vec<usize> = x.iter().map(|v| v / 2).collect();
    let x2: Vec<usize> = x.iter().map(|v| v % 2).collect();
    let (bits, plan) = codec.encode(&x).unwrap();
    assert_eq!(bits.len(), 100);
    assert_eq!(codec.decode(0, &bits, &x2).unwrap(), x1);
    assert_eq!(codec.decode(1, &bits, &x1).unwrap(), x2);
    for j in 0..2 {
        assert_eq!(codec.exact_conditional_distortion(&x, &plan, j).unwrap(), 0.0);
    }
    let mut cut = bits.clone();
    cut.truncate(bits.len() - 1);
    assert!(matches!(
        codec.decode(0, &cut, &x2),
        Err(Error::TruncatedBitstream { .. })
    ));
}

#[test]
fn identity_round_trip() {
    let spec = wyner_ziv(0.0);
    let config = CodecConfig::new(&spec, 1.0, 0.1, vec![0.0], Some(1)).unwrap();
    let catalog = catalog_of(&spec, &config, 1, vec![binary_identity(&spec, false)]);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let x: Vec<usize> = (0..50).map(|i| (i / 3) % 2).collect();
    let (bits, _) = codec.encode(&x).unwrap();
    let zt = codec.decode(0, &bits, &[1; 50]).unwrap();
    assert_eq!(zt, x);
    assert_eq!(spec.block_distortion(0, &zt, &x).unwrap(), 0.0);
}

#[test]
fn index_out_of_catalog() {
    let spec = wyner_ziv(0.1);
    let config = CodecConfig::new(&spec, 1.0, 0.1, vec![0.1], Some(1)).unwrap();
    let codes = vec![
        constant_zero(&spec, 1),
        binary_identity(&spec, true),
        binary_identity(&spec, false),
    ];
    let catalog = catalog_of(&spec, &config, 1, codes);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    // k_eff = 1: no header fields, then 2 index bits; 3 is out of range
    let mut bits = Bitstream::new();
    bits.push_bits(3, 2);
    let side = vec![0; 16];
    assert!(matches!(
        codec.decode(0, &bits, &side),
        Err(Error::IndexOutOfCatalog { index: 3, count: 3 })
    ));
}

#[test]
fn exact_distortion_constant_code() {
    let (spec, config) = constant_codec_parts(0.06);
    let catalog = catalog_of(&spec, &config, 1, vec![constant_zero(&spec, 1)]);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let x = ones_sequence(100, 37);
    let plan = codec.select_plan(&x).unwrap();
    let d = codec.exact_conditional_distortion(&x, &plan, 0).unwrap();
    assert!((d - 0.37).abs() < 1e-12);
}

/// Full expectation by enumeration of `y^n`, through the real decoder.
fn enumerated_distortion(codec: &Codec<'_>, bits: &Bitstream, x: &[usize], j: usize) -> f64 {
    let spec = codec.spec();
    let m = spec.marginal_channel(j).unwrap();
    let dec = spec.decoder(j).unwrap();
    let n = x.len();
    let mut total = 0.0;
    for yw in 0..word::word_count(m.side_size(), n).unwrap() {
        let y = word::unpack(yw, m.side_size(), n);
        let weight: f64 = x.iter().zip(&y).map(|(&a, &b)| m.side_prob(a, b)).product();
        if weight == 0.0 {
            continue;
        }
        let zt = codec.decode(j, bits, &y).unwrap();
        let mut per_seq = 0.0;
        for i in 0..n {
            let py = m.side_prob(x[i], y[i]);
            for z in 0..m.target_size() {
                per_seq += m.prob(x[i], y[i], z) / py * dec.distortion(zt[i], z);
            }
        }
        total += weight * per_seq / n as f64;
    }
    total
}

#[test]
fn exact_distortion_with_tail_matches_enumeration() {
    let spec = wyner_ziv(0.15);
    let config = CodecConfig::new(&spec, 1.0, 0.1, vec![0.1], None).unwrap();
    let mut codes = eight_codes(&spec);
    codes.insert(0, constant_zero(&spec, 1));
    let catalog = catalog_of(&spec, &config, 2, codes);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    for n in [11usize, 12] {
        let x: Vec<usize> = (0..n).map(|i| (i * 3 / 2 + 1) % 2).collect();
        // plan built by hand: exact_conditional_distortion does not consult k_n
        let plan = EncodePlan {
            block_len: 2,
            shift: 1,
            code_index: 3,
            error_declared: false,
            slack: vec![0.0],
        };
        let code = catalog.code(2, 3).unwrap();
        let table = codec.table(2, 3).unwrap();
        let exact = codec.exact_conditional_distortion(&x, &plan, 0).unwrap();
        let m = spec.marginal_channel(0).unwrap();
        let mut oracle = 0.0;
        let blocks = (n - 1) / 2;
        let tail: Vec<usize> = (0..n).filter(|&i| i == 0 || i > 2 * blocks).collect();
        assert_eq!(tail.len(), 1 + (n - 1) % 2);
        for i in &tail {
            oracle += m.letter_cost(x[*i], 0);
        }
        for b in 0..blocks {
            let block = &x[1 + 2 * b..3 + 2 * b];
            let mut sum = 0.0;
            for yw in 0..4u64 {
                let y = word::unpack(yw, 2, 2);
                let w: f64 = block.iter().zip(&y).map(|(&a, &v)| m.side_prob(a, v)).product();
                let cw = code.encode_block(block).unwrap();
                let zt = code.decode_block(0, cw, &y).unwrap();
                for i in 0..2 {
                    for z in 0..2 {
                        sum += w * m.prob(block[i], y[i], z) / m.side_prob(block[i], y[i])
                            * spec.decoder(0).unwrap().distortion(zt[i], z);
                    }
                }
            }
            oracle += sum;
            assert!((table.get(0, word::pack(block, 2)) * 2.0 - sum).abs() < 1e-12);
        }
        oracle /= n as f64;
        assert!((exact - oracle).abs() < 1e-12, "n={n}: {exact} vs {oracle}");
    }
}

#[test]
fn exact_distortion_matches_enumeration_through_decoder() {
    // n = 16 gives k_n = 2, so plans with l = 2 and a shift are reachable
    let spec = wyner_ziv(0.2);
    let config = CodecConfig::new(&spec, 1.0, 0.1, vec![0.05], Some(2)).unwrap();
    let mut codes = eight_codes(&spec);
    codes.insert(0, constant_zero(&spec, 1));
    let catalog = catalog_of(&spec, &config, 2, codes);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let n = 16;
    let x: Vec<usize> = (0..n).map(|i| (i * 5 / 3) % 2).collect();
    for (s, c) in [(0usize, 2usize), (1, 6)] {
        let plan = EncodePlan {
            block_len: 2,
            shift: s,
            code_index: c,
            error_declared: false,
            slack: vec![0.0],
        };
        let bits = codec.encode_with_plan(&x, &plan).unwrap();
        let exact = codec.exact_conditional_distortion(&x, &plan, 0).unwrap();
        let oracle = enumerated_distortion(&codec, &bits, &x, 0);
        assert!((exact - oracle).abs() < 1e-12, "s={s}: {exact} vs {oracle}");
    }
}

#[test]
fn rate_threshold_bounds_every_plan() {
    let spec = wyner_ziv(0.1);
    let config = CodecConfig::new(&spec, 1.0, 0.1, vec![0.1], None).unwrap();
    let mut codes = eight_codes(&spec);
    codes.push(constant_zero(&spec, 1));
    codes.push(constant_zero(&spec, 3));
    let catalog = catalog_of(&spec, &config, 3, codes);
    let codec = Codec::new(&spec, &config, &catalog).unwrap();
    let n0 = codec.rate_threshold();
    for n in [n0, 4 * n0] {
        for l in 1..=codec.effective_window(n).unwrap() {
            for s in 0..l {
                for c in 0..catalog.slot(l).unwrap().len() {
                    let bits = codec.layout(n, l, s, c).unwrap().total();
                    assert!(bits as f64 / n as f64 <= config.rate + config.delta);
                }
            }
        }
    }
}
