//! Named scenarios: Wyner-Ziv, side information that may be absent,
//! complementary delivery, and two decoders estimating a common component
//! from different side informations.

use std::fmt;
use std::str::FromStr;

use crate::blockcode::BlockCode;
use crate::catalog::{CatalogDescriptor, CatalogMode, DesignParams};
use crate::error::{Error, Result};
use crate::model::{DecoderSpec, SourceModel, SystemSpec};

/// Codec defaults carried by a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct CodecDefaults {
    pub rate: f64,
    pub delta: f64,
    pub targets: Vec<f64>,
    pub l_cap: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ScenarioPreset {
    pub name: String,
    pub spec: SystemSpec,
    pub source: SourceModel,
    pub codec: CodecDefaults,
    pub catalog: CatalogDescriptor,
}

/// A scenario name with its parameters, written `name(p, ..)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    WynerZiv {
        p_side: f64,
    },
    SideInfoMaybeAbsent {
        p_side: f64,
    },
    ComplementaryDelivery {
        rho: f64,
    },
    /// `X = (X0, X1, X2)` with `X_j = X0 xor Bernoulli(p_j)`.
    CommonTarget {
        p1: f64,
        p2: f64,
    },
}

impl Scenario {
    pub fn all_defaults() -> Vec<Scenario> {
        vec![
            Scenario::WynerZiv { p_side: 0.1 },
            Scenario::SideInfoMaybeAbsent { p_side: 0.1 },
            Scenario::ComplementaryDelivery { rho: 0.1 },
            Scenario::CommonTarget { p1: 0.1, p2: 0.2 },
        ]
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::WynerZiv { .. } => "J=1, Z=X, side information Y = X through BSC(p_side)",
            Self::SideInfoMaybeAbsent { .. } => {
                "J=2, decoder 1 without side information, decoder 2 with Y = BSC(p_side)(X), both estimate X"
            }
            Self::ComplementaryDelivery { .. } => {
                "J=2, X=(X1,X2) doubly symmetric with flip rho, decoder j sees the other half and estimates X_j"
            }
            Self::CommonTarget { .. } => "J=2, X=(X0,X1,X2), decoder j sees X_j, both estimate X0",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::WynerZiv { p_side } => write!(f, "wyner_ziv({p_side})"),
            Self::SideInfoMaybeAbsent { p_side } => write!(f, "si_maybe_absent({p_side})"),
            Self::ComplementaryDelivery { rho } => write!(f, "complementary_delivery({rho})"),
            Self::CommonTarget { p1, p2 } => write!(f, "fig4({p1},{p2})"),
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) if s.ends_with(')') => (&s[..open], &s[open + 1..s.len() - 1]),
            _ => (s, ""),
        };
        let args: Vec<f64> = args
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(|a| a.parse::<f64>().map_err(|_| Error::UnknownScenario(s.to_string())))
            .collect::<Result<_>>()?;
        let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
        let scenario = match name {
            "wyner_ziv" => Self::WynerZiv { p_side: arg(0, 0.1) },
            "si_maybe_absent" => Self::SideInfoMaybeAbsent { p_side: arg(0, 0.1) },
            "complementary_delivery" => Self::ComplementaryDelivery { rho: arg(0, 0.1) },
            "fig4" => Self::CommonTarget {
                p1: arg(0, 0.1),
                p2: arg(1, 0.2),
            },
            _ => return Err(Error::UnknownScenario(s.to_string())),
        };
        let expected = if matches!(scenario, Self::CommonTarget { .. }) {
            2
        } else {
            1
        };
        if args.len() > expected || args.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::UnknownScenario(s.to_string()));
        }
        Ok(scenario)
    }
}

/// `Y = X` through a binary symmetric channel with crossover `p`, `Z = X`.
pub fn bsc_side_spec(p: f64) -> Result<SystemSpec> {
    SystemSpec::from_kernel(2, vec![DecoderSpec::hamming(2, 2)], |x| {
        vec![(vec![x], vec![x], 1.0 - p), (vec![1 - x], vec![x], p)]
    })
}

/// Pair alphabet `x = 2 x1 + x2`.
pub fn complementary_spec() -> Result<SystemSpec> {
    SystemSpec::from_kernel(4, vec![DecoderSpec::hamming(2, 2), DecoderSpec::hamming(2, 2)], |x| {
        let (x1, x2) = (x / 2, x % 2);
        vec![(vec![x2, x1], vec![x1, x2], 1.0)]
    })
}

/// The lossless rate-1 code for complementary delivery: send `x1 xor x2`.
pub fn xor_code() -> BlockCode {
    let enc = (0..4).map(|x| (x / 2) ^ (x % 2)).collect();
    let dec = vec![0, 1, 1, 0];
    BlockCode::new(1, 2, 4, vec![2, 2], vec![2, 2], enc, vec![dec.clone(), dec]).expect("static table")
}

/// Doubly symmetric binary source on the pair alphabet.
pub fn dsbs(rho: f64) -> Result<SourceModel> {
    SourceModel::iid(vec![(1.0 - rho) / 2.0, rho / 2.0, rho / 2.0, (1.0 - rho) / 2.0])
}

fn design(l_max: usize, injected: Vec<BlockCode>) -> CatalogDescriptor {
    CatalogDescriptor {
        l_max,
        mode: CatalogMode::Design(DesignParams::default()),
        injected,
    }
}

pub fn scenario_preset(scenario: &Scenario) -> Result<ScenarioPreset> {
    let name = scenario.to_string();
    Ok(match *scenario {
        Scenario::WynerZiv { p_side } => ScenarioPreset {
            name,
            spec: bsc_side_spec(p_side)?,
            source: SourceModel::iid(vec![0.5, 0.5])?,
            codec: CodecDefaults {
                rate: 0.5,
                delta: 0.1,
                targets: vec![0.05],
                l_cap: Some(3),
            },
            catalog: design(3, vec![]),
        },
        Scenario::SideInfoMaybeAbsent { p_side } => {
            let spec = SystemSpec::from_kernel(2, vec![DecoderSpec::hamming(1, 2), DecoderSpec::hamming(2, 2)], |x| {
                vec![
                    (vec![0, x], vec![x, x], 1.0 - p_side),
                    (vec![0, 1 - x], vec![x, x], p_side),
                ]
            })?;
            ScenarioPreset {
                name,
                spec,
                source: SourceModel::iid(vec![0.5, 0.5])?,
                codec: CodecDefaults {
                    rate: 0.5,
                    delta: 0.1,
                    targets: vec![0.25, 0.08],
                    l_cap: Some(3),
                },
                catalog: design(3, vec![]),
            }
        }
        Scenario::ComplementaryDelivery { rho } => ScenarioPreset {
            name,
            spec: complementary_spec()?,
            source: dsbs(rho)?,
            codec: CodecDefaults {
                rate: 1.0,
                delta: 0.1,
                targets: vec![0.0, 0.0],
                l_cap: Some(2),
            },
            catalog: design(2, vec![xor_code()]),
        },
        Scenario::CommonTarget { p1, p2 } => {
            // x = 4 x0 + 2 x1 + x2
            let spec = SystemSpec::from_kernel(8, vec![DecoderSpec::hamming(2, 2), DecoderSpec::hamming(2, 2)], |x| {
                let (x0, x1, x2) = (x / 4, (x / 2) % 2, x % 2);
                vec![(vec![x1, x2], vec![x0, x0], 1.0)]
            })?;
            let mut pmf = vec![0.0; 8];
            for (x, slot) in pmf.iter_mut().enumerate() {
                let (x0, x1, x2) = (x / 4, (x / 2) % 2, x % 2);
                let f1 = if x1 == x0 { 1.0 - p1 } else { p1 };
                let f2 = if x2 == x0 { 1.0 - p2 } else { p2 };
                *slot = 0.5 * f1 * f2;
            }
            ScenarioPreset {
                name,
                spec,
                source: SourceModel::iid(pmf)?,
                codec: CodecDefaults {
                    rate: 0.5,
                    delta: 0.1,
                    targets: vec![0.25, 0.27],
                    l_cap: Some(2),
                },
                catalog: design(2, vec![]),
            }
        }
    })
}
