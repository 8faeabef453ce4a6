use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use multiterm::blockcode::{expected_code_distortion, write_codes};
use multiterm::experiments::{
    estimate_good_set_probability, run_trials, write_goodset_csv, write_trials_csv, Experiment, Scenario,
};
use multiterm::universal::{window_cap, Codec, EncodePlan};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod files;

#[derive(Parser)]
#[command(
    name = "multiterm",
    version,
    about = "Universal multiterminal lossy source coding simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in scenario presets.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
    /// Code catalogs.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Sample x^n from the configured source, encode it and pass it through the channel.
    Encode {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for x.txt, bits.bin, side_J.txt and target_J.txt.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Reconstruct at one decoder from a bitstream and its side information.
    Decode {
        #[arg(long)]
        config: PathBuf,
        /// 1-based decoder number.
        #[arg(long)]
        decoder: usize,
        #[arg(long)]
        bits: PathBuf,
        #[arg(long)]
        side: PathBuf,
        /// Write the reconstruction here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report the realized distortion against this target sequence.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Monte Carlo rate and distortion over independent trials.
    Trials {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Estimate how often the encoder declares an error, per block length n.
    Goodset {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "n-grid", value_delimiter = ',', num_args = 1.., required = true)]
        n_grid: Vec<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    List,
}

#[derive(Subcommand)]
enum CatalogAction {
    Build {
        #[arg(long)]
        config: PathBuf,
        /// Write the catalog's codes in the block-code text format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Scenario {
            action: ScenarioAction::List,
        } => {
            for s in Scenario::all_defaults() {
                println!("{:<28} {}", s.to_string(), s.description());
            }
            println!(
                "{:<28} any [system]/[source]/[codec]/[catalog] experiment file",
                "custom(file)"
            );
            Ok(())
        }
        Command::Catalog {
            action: CatalogAction::Build { config, out },
        } => catalog_build(&config, out.as_deref()),
        Command::Encode { config, n, seed, out } => encode(&config, n, seed, &out),
        Command::Decode {
            config,
            decoder,
            bits,
            side,
            out,
            target,
        } => decode(&config, decoder, &bits, &side, out.as_deref(), target.as_deref()),
        Command::Trials {
            config,
            n,
            trials,
            seed,
            csv,
        } => trials_cmd(&config, n, trials, seed, csv.as_deref()),
        Command::Goodset {
            config,
            n_grid,
            trials,
            seed,
            csv,
        } => goodset(&config, &n_grid, trials, seed, csv.as_deref()),
    }
}

fn load(config: &Path) -> Result<Experiment> {
    Experiment::load(config).with_context(|| format!("loading {}", config.display()))
}

fn catalog_build(config: &Path, out: Option<&Path>) -> Result<()> {
    let e = load(config)?;
    let catalog = e.build_catalog()?;
    println!("experiment {}", e.name);
    println!("epsilon {}", e.config.epsilon);
    for l in 1..=catalog.l_max() {
        let m = catalog.budget().max_codewords(l);
        let Ok(codes) = catalog.slot(l) else {
            println!("l={l} budget M<={m} codes=0");
            continue;
        };
        println!(
            "l={l} budget M<={m} codes={} index_bits={}",
            codes.len(),
            catalog.index_width(l)?
        );
        let pmf = e.source.block_pmf(l)?;
        for (c, code) in codes.iter().enumerate() {
            let d = (0..e.spec.decoder_count())
                .map(|j| expected_code_distortion(&e.spec, code, j, &pmf))
                .collect::<multiterm::Result<Vec<_>>>()?;
            println!(
                "  code {c} M={} E[d] under the configured source {d:?}",
                code.codewords()
            );
        }
    }
    if let Some(path) = out {
        let codes: Vec<_> = catalog.iter().map(|(_, _, code)| code.clone()).collect();
        std::fs::write(path, write_codes(&codes)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn print_plan(codec: &Codec<'_>, n: usize, plan: &EncodePlan, bits: usize) -> Result<()> {
    println!("n {n}");
    println!("k_n {}", window_cap(n)?);
    println!("block_len {}", plan.block_len);
    println!("shift {}", plan.shift);
    println!("code_index {}", plan.code_index);
    println!("error_declared {}", plan.error_declared);
    let slack: Vec<String> = plan.slack.iter().map(|s| format!("{s:.6}")).collect();
    println!("slack {}", slack.join(" "));
    println!("bits {bits}");
    println!("rate {:.6}", bits as f64 / n as f64);
    println!("rate_threshold {}", codec.rate_threshold());
    Ok(())
}

fn encode(config: &Path, n: usize, seed: u64, out: &Path) -> Result<()> {
    let e = load(config)?;
    let catalog = e.build_catalog()?;
    let codec = e.codec(&catalog)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = e.source.sample(n, &mut rng)?;
    let (bits, plan) = codec.encode(&x)?;
    let draw = e.spec.sample_channel(&x, &mut rng)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    files::write_sequence(&out.join("x.txt"), &x)?;
    files::write_bits(&out.join("bits.bin"), &bits)?;
    for j in 0..e.spec.decoder_count() {
        files::write_sequence(&out.join(format!("side_{}.txt", j + 1)), &draw.side[j])?;
        files::write_sequence(&out.join(format!("target_{}.txt", j + 1)), &draw.target[j])?;
    }
    print_plan(&codec, n, &plan, bits.len())?;
    for j in 0..e.spec.decoder_count() {
        println!(
            "decoder {} exact_distortion {:.6} bound {:.6}",
            j + 1,
            codec.exact_conditional_distortion(&x, &plan, j)?,
            codec.distortion_bound(n, j)?
        );
    }
    Ok(())
}

fn decode(
    config: &Path,
    decoder: usize,
    bits: &Path,
    side: &Path,
    out: Option<&Path>,
    target: Option<&Path>,
) -> Result<()> {
    let e = load(config)?;
    let j_count = e.spec.decoder_count();
    if decoder == 0 || decoder > j_count {
        bail!("decoder must be between 1 and {j_count}");
    }
    let j = decoder - 1;
    let catalog = e.build_catalog()?;
    let codec = e.codec(&catalog)?;
    let bits = files::read_bits(bits)?;
    let side = files::read_sequence(side)?;
    let zt = codec.decode(j, &bits, &side)?;
    match out {
        Some(path) => files::write_sequence(path, &zt)?,
        None => {
            let text: Vec<String> = zt.iter().map(ToString::to_string).collect();
            println!("{}", text.join(" "));
        }
    }
    if let Some(path) = target {
        let z = files::read_sequence(path)?;
        eprintln!("distortion {:.6}", e.spec.block_distortion(j, &zt, &z)?);
    }
    Ok(())
}

fn trials_cmd(config: &Path, n: usize, trials: usize, seed: u64, csv: Option<&Path>) -> Result<()> {
    let e = load(config)?;
    let catalog = e.build_catalog()?;
    let codec = e.codec(&catalog)?;
    let summary = run_trials(&codec, &e.source, n, trials, seed)?;
    println!("experiment {} n={n} trials={trials} seed={seed}", e.name);
    println!(
        "rate {:.6} ± {:.6} (R + δ = {})",
        summary.rate.mean,
        summary.rate.half_width,
        e.config.rate + e.config.delta
    );
    for (j, d) in summary.distortion.iter().enumerate() {
        println!(
            "distortion_{} {:.6} ± {:.6} (Δ + δ = {})",
            j + 1,
            d.mean,
            d.half_width,
            e.config.targets[j] + e.config.delta
        );
    }
    println!("error_fraction {:.6}", summary.error_fraction);
    if let Some(path) = csv {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_trials_csv(file, &e.name, e.spec.decoder_count(), &summary.reports)?;
    }
    Ok(())
}

fn goodset(config: &Path, n_grid: &[usize], trials: usize, seed: u64, csv: Option<&Path>) -> Result<()> {
    let e = load(config)?;
    let catalog = e.build_catalog()?;
    let codec = e.codec(&catalog)?;
    let report = estimate_good_set_probability(&codec, &e.source, n_grid, trials, seed, None)?;
    println!("experiment {} epsilon {:.6}", e.name, report.epsilon);
    println!(
        "designated code l={} index={} E[d]={:?} premise {}",
        report.designated.0,
        report.designated.1,
        report.designated_distortion,
        if report.premise_holds { "holds" } else { "fails" }
    );
    for p in &report.points {
        match p.oracle {
            Some(o) => println!(
                "n={} errors {}/{} fraction {:.6} oracle {:.6}",
                p.n, p.errors, p.trials, p.fraction, o
            ),
            None => println!("n={} errors {}/{} fraction {:.6}", p.n, p.errors, p.trials, p.fraction),
        }
    }
    if let Some(path) = csv {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_goodset_csv(file, &e.name, &report)?;
    }
    Ok(())
}
