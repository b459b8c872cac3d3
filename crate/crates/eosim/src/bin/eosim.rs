//! Command-line front end: load a configuration, run one experiment, write
//! CSV/SVG/manifest files into the output directory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eosim::config::{parse_constraint, parse_quadrature, ExperimentConfig};
use eosim::error::{EosError, Result};
use eosim::experiments;

#[derive(Parser)]
#[command(
    name = "eosim",
    version,
    about = "Time-domain electro-optic quadrature tomography simulator"
)]
struct Cli {
    /// Configuration file (TOML); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides config and the EOSIM_OUT variable).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band-limited quadrature waveforms and the coupled gate profiles.
    Waveforms,
    /// Bandwidth sweep of coupling intensity and mode matching.
    Sweep {
        /// Quadrature to read out: e | h.
        #[arg(long, default_value = "e")]
        quadrature: String,
        /// Resource constraint: constant-photon-number | constant-intensity.
        #[arg(long, default_value = "constant-photon-number")]
        constraint: String,
    },
    /// Variance scan, Husimi grid and optional shot samples of the squeezed
    /// signal seen through the multiplexed chain.
    Tomography {
        /// Number of simultaneous (e, h) shot samples to write.
        #[arg(long)]
        shots: Option<usize>,
        /// Seed of the shot sampler.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Alternative detection layouts.
    Variant {
        #[command(subcommand)]
        variant: VariantCommand,
    },
}

#[derive(Subcommand)]
enum VariantCommand {
    /// Split the post-crystal output between a field arm and a Hilbert arm.
    BeamSplitter {
        /// Power share of the field arm; balanced from the couplings when
        /// omitted.
        #[arg(long)]
        transmission: Option<f64>,
    },
    /// Effective homodyne readout at arbitrary quadrature phases.
    PhaseScan {
        /// Comma-separated phases in radians.
        #[arg(
            long = "phi-list",
            default_value = "0,0.7853981633974483,1.5707963267948966,3.141592653589793"
        )]
        phi_list: String,
    },
}

fn out_dir(cli_out: &Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    if let Some(p) = cli_out {
        return p.clone();
    }
    if !cfg.output.directory.is_empty() {
        return PathBuf::from(&cfg.output.directory);
    }
    if let Ok(env) = std::env::var("EOSIM_OUT") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from("eosim-out")
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.validate()?;
    let dir = out_dir(&cli.out, &cfg);
    std::fs::create_dir_all(&dir)?;

    let output = match &cli.command {
        Command::Waveforms => experiments::run_waveforms(&cfg, &dir)?,
        Command::Sweep { quadrature, constraint } => experiments::run_sweep(
            &cfg,
            parse_quadrature(quadrature)?,
            parse_constraint(constraint)?,
            &dir,
        )?,
        Command::Tomography { shots, seed } => experiments::run_tomography(
            &cfg,
            shots.unwrap_or(cfg.tomography.shots),
            seed.unwrap_or(cfg.tomography.seed),
            &dir,
        )?,
        Command::Variant { variant } => match variant {
            VariantCommand::BeamSplitter { transmission } => {
                experiments::run_variant_beam_splitter(&cfg, *transmission, &dir)?
            }
            VariantCommand::PhaseScan { phi_list } => {
                let phis: Result<Vec<f64>> = phi_list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|e| EosError::Config(format!("bad phase '{s}': {e}")))
                    })
                    .collect();
                experiments::run_variant_phase_scan(&cfg, &phis?, &dir)?
            }
        },
    };
    Ok(output.files)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
