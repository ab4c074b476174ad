//! `sticky-tce`: simulate, discretize and validate sticky spectrally
//! positive Lévy processes built from time-change equations.
//!
//! Exit codes are part of the interface: 0 pass, 1 configuration error,
//! 2 model-hypothesis rejection, 3 statistical failure, 4 inconclusive.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::RunConfig;

pub(crate) const EXIT_PASS: u8 = 0;
pub(crate) const EXIT_CONFIG: u8 = 1;
pub(crate) const EXIT_MODEL: u8 = 2;
pub(crate) const EXIT_STAT_FAIL: u8 = 3;
pub(crate) const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "sticky-tce", version, about)]
struct Cli {
    /// Config document (TOML or JSON). Omit to use --preset.
    #[arg(long, global = true, env = "STICKY_TCE_CONFIG")]
    config: Option<PathBuf>,

    /// Named preset: brownian-sticky, no-solution, gamma-sweep.
    #[arg(long, global = true, env = "STICKY_TCE_PRESET")]
    preset: Option<String>,

    /// Overrides the config seed.
    #[arg(long, global = true, env = "STICKY_TCE_SEED")]
    seed: Option<u64>,

    /// Output directory (default `./out`).
    #[arg(long, global = true, env = "STICKY_TCE_OUT")]
    out: Option<PathBuf>,

    /// Worker threads for ensembles (default: all cores). Results do not
    /// depend on this.
    #[arg(long, global = true, env = "STICKY_TCE_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one driver, solve the time-change equation exactly, write the
    /// solution bundle (Z.csv, C.json, L.csv, manifest.json).
    Simulate,
    /// Mesh-refinement study of the Euler scheme against the exact solution;
    /// writes convergence.csv. With --preset no-solution runs the staircase
    /// demonstration instead.
    EulerConverge,
    /// Run a named validation suite and write report.json.
    Validate {
        /// reflection-axioms, monotonicity, martingale, occupation or
        /// gamma-sweep.
        #[arg(long, env = "STICKY_TCE_SUITE")]
        suite: String,
        /// Boundary defect injected into the martingale suite.
        #[arg(long)]
        defect: Option<f64>,
    },
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => anyhow::bail!("provide --config PATH or --preset NAME"),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.check()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(jobs) = cli.jobs {
        // ignore failure: the global pool may already exist in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }

    let cfg = match effective_config(&cli) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("config error: {err:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));

    let outcome = match &cli.command {
        Command::Simulate => commands::simulate(&cfg, &out_dir),
        Command::EulerConverge => commands::euler_converge(&cfg, &out_dir, cli.preset.as_deref()),
        Command::Validate { suite, defect } => {
            let mut cfg = cfg;
            if let Some(d) = defect {
                cfg.validate.defect = *d;
            }
            commands::validate(&cfg, &out_dir, suite)
        }
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
