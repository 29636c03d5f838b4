//! Flags, the optional JSON config file, and their merge into one validated
//! [`ExperimentConfig`]. Flags win over file values, file values over defaults.

use std::path::PathBuf;

use cat_teleport::{ChannelSign, Complex64, PartitionKind};
use clap::{Parser, ValueEnum};
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Teleport,
    TeleportTripartite,
    ChannelPrepare,
    ScanSuccess,
    ScanConcurrence,
    LimitCheck,
    ParityDemo,
    CrossValidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    Analytic,
    Fock,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// `re,im` or a bare real part.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parse = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("expected re,im, got {s:?}"));
    let z = match s.split_once(',') {
        Some((re, im)) => Complex64::new(parse(re)?, parse(im)?),
        None => Complex64::new(parse(s)?, 0.0),
    };
    if !z.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(z)
}

#[derive(Debug, Parser)]
#[command(name = "cat-teleport", version, about = "Teleportation of entangled coherent states through linear optics")]
pub struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: Option<Experiment>,
    /// Coherent amplitude as re,im.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub eps_plus: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub eps_minus: Option<Complex64>,
    #[arg(long, value_parser = clap::value_parser!(ChannelSign))]
    pub channel_sign: Option<ChannelSign>,
    #[arg(long, value_enum)]
    pub engine: Option<EngineChoice>,
    /// Fock cutoff applied to every mode instead of the mean-photon rule.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Probability mass the enumerated outcomes may leave out.
    #[arg(long)]
    pub mass_tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo shots drawn from the exact distribution.
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Scan grid as start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_grid: Option<String>,
    /// Photon number for parity-demo.
    #[arg(long)]
    pub n: Option<usize>,
    /// Concurrence cut: 3(45), 4(35) or 5(34).
    #[arg(long, value_parser = clap::value_parser!(PartitionKind))]
    pub partition: Option<PartitionKind>,
    /// Parties of the input state (teleport) or modes of the channel (channel-prepare).
    #[arg(long)]
    pub parties: Option<usize>,
    /// Vacuum amplitude of the small-amplitude input.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub a: Option<Complex64>,
    /// Single-photon amplitude of the small-amplitude input.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub b: Option<Complex64>,
    /// JSON file with any of the above; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<Experiment>,
    pub alpha: Option<Complex64>,
    pub eps_plus: Option<Complex64>,
    pub eps_minus: Option<Complex64>,
    pub channel_sign: Option<ChannelSign>,
    pub engine: Option<EngineChoice>,
    pub cutoff_override: Option<usize>,
    pub mass_tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub alpha_grid: Option<String>,
    pub n: Option<usize>,
    pub partition: Option<PartitionKind>,
    pub parties: Option<usize>,
    pub a: Option<Complex64>,
    pub b: Option<Complex64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// `None` lets each experiment pick its own default.
    pub alpha: Option<Complex64>,
    pub eps_plus: Complex64,
    pub eps_minus: Complex64,
    pub channel_sign: ChannelSign,
    pub engine: EngineChoice,
    pub cutoff_override: Option<usize>,
    pub mass_tolerance: f64,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub output_path: Option<PathBuf>,
    /// `None` picks CSV for scans and JSON otherwise.
    pub format: Option<Format>,
    pub alpha_grid: Option<String>,
    pub n: Option<usize>,
    pub partition: PartitionKind,
    pub parties: Option<usize>,
    pub a: Complex64,
    pub b: Complex64,
}

impl ExperimentConfig {
    pub fn resolve(args: Args, file: FileConfig) -> Result<Self, Failure> {
        let one = Complex64::new(1.0, 0.0);
        let config = Self {
            experiment: args
                .experiment
                .or(file.experiment)
                .ok_or_else(|| Failure::Usage("no experiment given on the command line or in the config".into()))?,
            alpha: args.alpha.or(file.alpha),
            eps_plus: args.eps_plus.or(file.eps_plus).unwrap_or(one),
            eps_minus: args.eps_minus.or(file.eps_minus).unwrap_or(one),
            channel_sign: args.channel_sign.or(file.channel_sign).unwrap_or(ChannelSign::Minus),
            engine: args.engine.or(file.engine).unwrap_or(EngineChoice::Analytic),
            cutoff_override: args.cutoff.or(file.cutoff_override),
            mass_tolerance: args
                .mass_tolerance
                .or(file.mass_tolerance)
                .unwrap_or(cat_teleport::measurement::DEFAULT_MASS_TOLERANCE),
            seed: args.seed.or(file.seed),
            shots: args.shots.or(file.shots),
            output_path: args.output.or(file.output_path),
            format: args.format.or(file.format),
            alpha_grid: args.alpha_grid.or(file.alpha_grid),
            n: args.n.or(file.n),
            partition: args.partition.or(file.partition).unwrap_or(PartitionKind::Second),
            parties: args.parties.or(file.parties),
            a: args.a.or(file.a).unwrap_or(one),
            b: args.b.or(file.b).unwrap_or(one),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), Failure> {
        if !(self.mass_tolerance > 0.0 && self.mass_tolerance < 1.0) {
            return Err(Failure::Usage(format!("mass tolerance {} must lie in (0, 1)", self.mass_tolerance)));
        }
        if self.cutoff_override == Some(0) {
            return Err(Failure::Usage("cutoff must be at least 1".into()));
        }
        if self.shots.is_some() && self.seed.is_none() {
            return Err(Failure::Usage("--shots needs --seed".into()));
        }
        let alpha = self.alpha.unwrap_or_default();
        for (name, z) in [("alpha", alpha), ("eps-plus", self.eps_plus), ("eps-minus", self.eps_minus)] {
            if !z.is_finite() {
                return Err(Failure::Usage(format!("{name} is not finite")));
            }
        }
        Ok(())
    }
}
