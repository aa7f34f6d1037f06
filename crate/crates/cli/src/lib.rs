//! Command-line front end: regions, baseline comparison, simulation and
//! exact secrecy verification.

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use commands::{Extras, Failure, Output, EXIT_INPUT};
use config::{parse_pair, FileConfig, LinkSpec, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "seccap", version, about = "Secret-message capacity regions of erasure networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace the achievable region; CSV of frontier vertices.
    Region(Args),
    /// Compare against link sharing and path sharing per swept angle.
    Compare(Args),
    /// Packet-level simulation at an LP vertex; JSON report.
    Simulate(Args),
    /// Field-mode runs with exact secrecy and decodability verdicts.
    Verify(Args),
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// JSON config; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// y, ry or x.
    #[arg(long)]
    pub topology: Option<String>,
    /// One link as `delta,delta_e`, in link order; repeat per link.
    #[arg(long = "link", value_name = "D,DE")]
    pub links: Vec<String>,
    /// Randomness rate at the relay-network source (ry only).
    #[arg(long)]
    pub d0: Option<f64>,
    /// Number of swept objective angles.
    #[arg(long)]
    pub angles: Option<usize>,
    /// Objective weights for the simulated vertex.
    #[arg(long, value_name = "W1,W2")]
    pub weights: Option<String>,
    /// Slots per link.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Consecutive seeds to run, starting at --seed.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Rate scaling in (0, 1] applied to the vertex.
    #[arg(long)]
    pub margin: Option<f64>,
    /// counting or field (verify always uses field).
    #[arg(long)]
    pub mode: Option<String>,
    /// Write the CSV / JSON / table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot (region and compare).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Run at this rate pair instead of the weighted vertex.
    #[arg(long, value_name = "R1,R2")]
    pub point: Option<String>,
    /// Pad with raw key packets, skipping privacy amplification.
    #[arg(long)]
    pub unsafe_raw_keys: bool,
}

impl Args {
    fn flag_config(&self) -> anyhow::Result<FileConfig> {
        let links = if self.links.is_empty() {
            None
        } else {
            let mut v = Vec::new();
            for (i, s) in self.links.iter().enumerate() {
                let (delta, delta_e) = parse_pair(&format!("--link #{}", i + 1), s)?;
                v.push(LinkSpec { delta, delta_e });
            }
            Some(v)
        };
        let weights = self.weights.as_deref().map(|s| parse_pair("--weights", s)).transpose()?;
        Ok(FileConfig {
            topology: self.topology.clone(),
            links,
            d0: self.d0,
            angles: self.angles,
            weights: weights.map(|(a, b)| [a, b]),
            n: self.n,
            seed: self.seed,
            margin: self.margin,
            mode: self.mode.clone(),
            out: self.out.clone(),
        })
    }

    pub fn resolve(&self) -> anyhow::Result<(RunConfig, Extras)> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let cfg = RunConfig::from_file_config(&file.overlay(self.flag_config()?))?;
        let point = self.point.as_deref().map(|s| parse_pair("--point", s)).transpose()?;
        if self.seeds == 0 {
            return Err(anyhow!("--seeds must be at least 1"));
        }
        Ok((
            cfg,
            Extras {
                svg: self.svg.clone(),
                point,
                seeds: self.seeds,
                unsafe_raw_keys: self.unsafe_raw_keys,
            },
        ))
    }
}

fn emit(out: &Output, cfg: &RunConfig, extras: &Extras) -> anyhow::Result<()> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &out.primary).with_context(|| format!("writing {}", path.display()))?;
            print!("{}", out.summary);
        }
        None => {
            std::io::stdout().write_all(out.primary.as_bytes())?;
            eprint!("{}", out.summary);
        }
    }
    if let (Some(path), Some(svg)) = (&extras.svg, &out.svg) {
        std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Runs one invocation; returns the process exit status.
pub fn run(cli: Cli) -> u8 {
    let (args, f): (&Args, fn(&RunConfig, &Extras) -> Result<Output, Failure>) = match &cli.command {
        Command::Region(a) => (a, commands::region),
        Command::Compare(a) => (a, commands::compare),
        Command::Simulate(a) => (a, commands::simulate),
        Command::Verify(a) => (a, commands::verify),
    };
    let (cfg, extras) = match args.resolve() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_INPUT;
        }
    };
    match f(&cfg, &extras) {
        Ok(out) => match emit(&out, &cfg, &extras) {
            Ok(()) => out.code,
            Err(e) => {
                eprintln!("error: {e:#}");
                EXIT_INPUT
            }
        },
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            code
        }
    }
}
