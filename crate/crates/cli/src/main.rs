use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use confwarp_core::config::{AugmentationKind, Command, ConfigFile, Overrides, RunConfig, Threads, CONFIG_ENV};
use confwarp_core::selftest::Suite;

mod commands;

/// Conformal augmentation of square images.
#[derive(Debug, Parser)]
#[command(name = "confwarp", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = CONFIG_ENV, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed for dataset generation.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads, or "auto" for one per core.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<Threads>,

    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Write one augmented copy of each input per parameter set.
    Augment {
        /// Square PNG, PGM or PPM images; overrides `[augment] inputs`.
        inputs: Vec<PathBuf>,
    },
    /// Generate the synthetic disk-counting dataset.
    Generate {
        #[arg(long)]
        augmentation: Option<AugmentationKind>,
    },
    /// Write every stage of the augmentation pipeline for one image.
    Preview {
        /// Input image; a line pattern is used when absent.
        input: Option<PathBuf>,
    },
    /// Run the numerical self-checks.
    Selftest {
        /// Run only this suite: elliptic, confmap or warp.
        suite: Option<Suite>,

        /// Scale the map constant L by this factor (negative control).
        #[arg(long, hide = true, value_name = "FACTOR")]
        corrupt_l: Option<f64>,
    },
}

fn load(cli: &Cli) -> anyhow::Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let (command, inputs, augmentation) = match &cli.command {
        CliCommand::Augment { inputs } => (Command::Augment, inputs.clone(), None),
        CliCommand::Generate { augmentation } => (Command::Generate, Vec::new(), *augmentation),
        CliCommand::Preview { input } => (Command::Preview, input.iter().cloned().collect(), None),
        CliCommand::Selftest { .. } => (Command::Selftest, Vec::new(), None),
    };
    let overrides = Overrides { inputs, out: cli.out.clone(), seed: cli.seed, threads: cli.threads, augmentation };
    Ok(RunConfig::resolve(command, file, overrides)?)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let config = load(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.count())
        .build()
        .context("cannot start worker threads")?;
    pool.install(|| match &cli.command {
        CliCommand::Augment { .. } => commands::augment(&config),
        CliCommand::Generate { .. } => commands::generate(&config),
        CliCommand::Preview { .. } => commands::preview(&config),
        CliCommand::Selftest { suite, corrupt_l } => Ok(commands::selftest(*suite, *corrupt_l)),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
