//! TOML experiment files.
//!
//! ```toml
//! name = "wz"
//!
//! [scenario]
//! preset = "wyner_ziv(0.1)"
//!
//! [codec]
//! rate = 0.5
//! delta = 0.1
//! targets = [0.1]
//! l_cap = 3
//!
//! [catalog]
//! mode = "design"
//! l_max = 3
//! codes = ["extra.codes"]
//!
//! [catalog.design]
//! restarts = 2
//! iterations = 50
//! seed = 7
//! training = [{ kind = "uniform" }, { kind = "source" }]
//! ```
//!
//! Without `[scenario]`, a `[system]`, `[source]` and `[codec]` table are
//! all required:
//!
//! ```toml
//! [system]
//! source_size = 2
//! channel = { kind = "table", rows = [[0.9, 0.0, 0.1, 0.0], [0.0, 0.1, 0.0, 0.9]] }
//! decoders = [{ side_size = 2, target_size = 2 }]
//!
//! [source]
//! kind = "markov"
//! transition = [[0.9, 0.1], [0.2, 0.8]]
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::presets::{bsc_side_spec, scenario_preset, Scenario};
use crate::blockcode::{self, BlockCode};
use crate::catalog::{build_catalog, CatalogDescriptor, CatalogMode, CodeCatalog, DesignParams, TrainingPmf};
use crate::error::{Error, Result};
use crate::model::{DecoderSpec, SourceModel, SystemSpec};
use crate::universal::{Codec, CodecConfig};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    name: Option<String>,
    scenario: Option<ScenarioTable>,
    system: Option<SystemTable>,
    source: Option<SourceTable>,
    codec: Option<CodecTable>,
    catalog: Option<CatalogTable>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioTable {
    preset: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemTable {
    source_size: usize,
    decoders: Vec<DecoderTable>,
    channel: ChannelTable,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecoderTable {
    side_size: usize,
    target_size: usize,
    recon_size: Option<usize>,
    /// Row-major `recon × target`; Hamming when absent.
    distortion: Option<Vec<Vec<f64>>>,
    d_max: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ChannelTable {
    /// Dense rows over the packed joint output `(y_1..y_J, z_1..z_J)`.
    Table { rows: Vec<Vec<f64>> },
    /// Binary Wyner-Ziv: `Y = X` through BSC(p), `Z = X`.
    Bsc { p: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SourceTable {
    Iid {
        pmf: Vec<f64>,
    },
    Markov {
        transition: Vec<Vec<f64>>,
        #[serde(default)]
        allow_periodic: bool,
    },
    FunctionOfMarkov {
        transition: Vec<Vec<f64>>,
        emission: Vec<usize>,
        source_size: usize,
    },
}

impl SourceTable {
    fn build(&self) -> Result<SourceModel> {
        match self {
            Self::Iid { pmf } => SourceModel::iid(pmf.clone()),
            Self::Markov {
                transition,
                allow_periodic,
            } => {
                if *allow_periodic {
                    SourceModel::markov_allow_periodic(transition.clone())
                } else {
                    SourceModel::markov(transition.clone())
                }
            }
            Self::FunctionOfMarkov {
                transition,
                emission,
                source_size,
            } => SourceModel::function_of_markov(transition.clone(), emission.clone(), *source_size),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodecTable {
    rate: Option<f64>,
    delta: Option<f64>,
    targets: Option<Vec<f64>>,
    l_cap: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModeName {
    Design,
    Enumerate,
    Injected,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogTable {
    mode: Option<ModeName>,
    l_max: Option<usize>,
    limit: Option<u128>,
    #[serde(default)]
    codes: Vec<PathBuf>,
    design: Option<DesignTable>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignTable {
    restarts: Option<usize>,
    iterations: Option<usize>,
    seed: Option<u64>,
    weights: Option<Vec<f64>>,
    training: Option<Vec<TrainingTable>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TrainingTable {
    Uniform,
    /// The experiment's own source model.
    Source,
    Iid {
        pmf: Vec<f64>,
    },
    Markov {
        transition: Vec<Vec<f64>>,
    },
}

/// Default literal-enumeration limit.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1 << 20;

/// A fully resolved experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub spec: SystemSpec,
    pub source: SourceModel,
    pub config: CodecConfig,
    pub catalog: CatalogDescriptor,
}

impl Experiment {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml(&text, base)
    }

    /// Parses `text`; code file paths resolve against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let file: ExperimentFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let preset = match &file.scenario {
            Some(s) => Some(scenario_preset(&s.preset.parse::<Scenario>()?)?),
            None => None,
        };
        if preset.is_some() && file.system.is_some() {
            return Err(Error::Config("give either [scenario] or [system], not both".into()));
        }
        let spec = match (&preset, &file.system) {
            (Some(p), _) => p.spec.clone(),
            (None, Some(system)) => build_system(system)?,
            (None, None) => return Err(Error::Config("missing [scenario] or [system]".into())),
        };
        let source = match (&file.source, &preset) {
            (Some(s), _) => s.build()?,
            (None, Some(p)) => p.source.clone(),
            (None, None) => return Err(Error::Config("missing [source]".into())),
        };
        if source.source_size() != spec.source_size() {
            return Err(Error::Config(format!(
                "source alphabet {} does not match the system alphabet {}",
                source.source_size(),
                spec.source_size()
            )));
        }

        let defaults = preset.as_ref().map(|p| &p.codec);
        let codec = file.codec.as_ref();
        let rate = codec.and_then(|c| c.rate).or(defaults.map(|d| d.rate));
        let delta = codec.and_then(|c| c.delta).or(defaults.map(|d| d.delta));
        let targets = codec
            .and_then(|c| c.targets.clone())
            .or(defaults.map(|d| d.targets.clone()));
        let l_cap = codec.and_then(|c| c.l_cap).or(defaults.and_then(|d| d.l_cap));
        let (Some(rate), Some(delta), Some(targets)) = (rate, delta, targets) else {
            return Err(Error::Config("[codec] needs rate, delta and targets".into()));
        };
        let config = CodecConfig::new(&spec, rate, delta, targets, l_cap)?;

        let catalog = build_descriptor(
            file.catalog.as_ref(),
            preset.as_ref().map(|p| &p.catalog),
            &source,
            l_cap,
            base,
        )?;
        let name = file
            .name
            .or(preset.map(|p| p.name))
            .unwrap_or_else(|| "custom".to_string());
        Ok(Self {
            name,
            spec,
            source,
            config,
            catalog,
        })
    }

    pub fn build_catalog(&self) -> Result<CodeCatalog> {
        build_catalog(&self.spec, self.config.budget(), self.catalog.clone())
    }

    pub fn codec<'a>(&'a self, catalog: &'a CodeCatalog) -> Result<Codec<'a>> {
        Codec::new(&self.spec, &self.config, catalog)
    }
}

fn build_system(system: &SystemTable) -> Result<SystemSpec> {
    let decoders = system
        .decoders
        .iter()
        .map(|d| {
            let recon = d.recon_size.unwrap_or(d.target_size);
            match &d.distortion {
                None if recon == d.target_size && d.d_max.is_none() => {
                    Ok(DecoderSpec::hamming(d.side_size, d.target_size))
                }
                None => {
                    let table = (0..recon)
                        .flat_map(|r| (0..d.target_size).map(move |z| if r == z { 0.0 } else { 1.0 }))
                        .collect();
                    Ok(DecoderSpec::new(d.side_size, d.target_size, recon, table, d.d_max))
                }
                Some(rows) => {
                    if rows.len() != recon || rows.iter().any(|r| r.len() != d.target_size) {
                        return Err(Error::Config(
                            "distortion table must be recon_size rows of target_size".into(),
                        ));
                    }
                    Ok(DecoderSpec::new(
                        d.side_size,
                        d.target_size,
                        recon,
                        rows.concat(),
                        d.d_max,
                    ))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    match &system.channel {
        ChannelTable::Table { rows } => SystemSpec::new(system.source_size, decoders, rows.clone()),
        ChannelTable::Bsc { p } => {
            let spec = bsc_side_spec(*p)?;
            if system.source_size != 2 || decoders != spec.decoders() {
                return Err(Error::Config(
                    "the bsc channel needs a binary source and one binary Hamming decoder".into(),
                ));
            }
            Ok(spec)
        }
    }
}

fn build_descriptor(
    table: Option<&CatalogTable>,
    preset: Option<&CatalogDescriptor>,
    source: &SourceModel,
    l_cap: Option<usize>,
    base: &Path,
) -> Result<CatalogDescriptor> {
    let Some(table) = table else {
        return match preset {
            Some(p) => Ok(p.clone()),
            None => Err(Error::Config("missing [catalog]".into())),
        };
    };
    let mut injected = preset.map(|p| p.injected.clone()).unwrap_or_default();
    for path in &table.codes {
        let full = base.join(path);
        let text = std::fs::read_to_string(&full)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", full.display())))?;
        injected.extend(blockcode::parse_codes(&text)?);
    }
    let l_max = table
        .l_max
        .or(preset.map(|p| p.l_max))
        .or(l_cap)
        .or(injected.iter().map(BlockCode::block_len).max())
        .ok_or_else(|| Error::Config("[catalog] needs l_max".into()))?;
    let mode = match table.mode {
        Some(ModeName::Enumerate) => CatalogMode::Enumerate {
            limit: table.limit.unwrap_or(DEFAULT_ENUMERATION_LIMIT),
        },
        Some(ModeName::Injected) => CatalogMode::Injected,
        Some(ModeName::Design) => CatalogMode::Design(design_params(table.design.as_ref(), None, source)?),
        None => match preset.map(|p| &p.mode) {
            Some(CatalogMode::Design(p)) => CatalogMode::Design(design_params(table.design.as_ref(), Some(p), source)?),
            Some(other) => other.clone(),
            None => CatalogMode::Design(design_params(table.design.as_ref(), None, source)?),
        },
    };
    Ok(CatalogDescriptor { l_max, mode, injected })
}

fn design_params(
    table: Option<&DesignTable>,
    preset: Option<&DesignParams>,
    source: &SourceModel,
) -> Result<DesignParams> {
    let base = preset.cloned().unwrap_or_default();
    let Some(table) = table else {
        return Ok(base);
    };
    let training = match &table.training {
        None => base.training,
        Some(list) => list
            .iter()
            .map(|t| {
                Ok(match t {
                    TrainingTable::Uniform => TrainingPmf::Uniform,
                    TrainingTable::Source => TrainingPmf::Model(source.clone()),
                    TrainingTable::Iid { pmf } => TrainingPmf::Model(SourceModel::iid(pmf.clone())?),
                    TrainingTable::Markov { transition } => {
                        TrainingPmf::Model(SourceModel::markov_allow_periodic(transition.clone())?)
                    }
                })
            })
            .collect::<Result<_>>()?,
    };
    Ok(DesignParams {
        training,
        weights: table.weights.clone().or(base.weights),
        restarts: table.restarts.unwrap_or(base.restarts),
        iterations: table.iterations.unwrap_or(base.iterations),
        seed: table.seed.unwrap_or(base.seed),
    })
}
