//! Command-line front end: `piezoguide <spectrum|trace|sweep|analyze|relax>`.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use piezoguide::pipeline::{self, AnalyzeInputs, RunManifest, RunOptions};
use piezoguide::scenario::Scenario;

#[derive(Parser, Debug)]
#[command(name = "piezoguide", version, about = "Quantum-dot waveguide pressure sensor simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario file; omitted keys take their default values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `trace.master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: `output.directory` of the scenario).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for ray tracing.
    #[arg(long, env = "PIEZOGUIDE_THREADS")]
    threads: Option<usize>,
    /// Write into an existing output directory.
    #[arg(long)]
    overwrite: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-dot emission spectra over the `spectrum.forces_nn` grid.
    Spectrum(Common),
    /// One Monte Carlo run of the configured scene.
    Trace(Common),
    /// Force sweeps per segment and their calibration curves.
    Sweep(Common),
    /// Fit replicate spectra and/or build a calibration from a force manifest.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// `force_nn,path` CSV listing one spectrum per row.
        #[arg(long)]
        forces: Option<PathBuf>,
        /// Replicate `wavelength_nm,intensity` spectra.
        spectra: Vec<PathBuf>,
    },
    /// Fit a `time_min,amplitude,wavelength_nm` relaxation series.
    Relax {
        #[command(flatten)]
        common: Common,
        input: PathBuf,
    },
}

fn load(common: &Common) -> Result<(Scenario, RunOptions)> {
    let mut scenario = match &common.config {
        Some(p) => Scenario::from_path(p).with_context(|| format!("loading {}", p.display()))?,
        None => Scenario::default(),
    };
    if let Some(seed) = common.seed {
        scenario.trace.master_seed = seed;
    }
    if common.threads == Some(0) {
        anyhow::bail!("--threads must be at least 1");
    }
    let opts = RunOptions { out: common.out.clone(), overwrite: common.overwrite, threads: common.threads };
    Ok((scenario, opts))
}

fn run(cli: Cli) -> Result<RunManifest> {
    let manifest = match &cli.command {
        Command::Spectrum(c) => {
            let (s, o) = load(c)?;
            pipeline::cmd_spectrum(&s, &o)?
        }
        Command::Trace(c) => {
            let (s, o) = load(c)?;
            pipeline::cmd_trace(&s, &o)?
        }
        Command::Sweep(c) => {
            let (s, o) = load(c)?;
            pipeline::cmd_sweep(&s, &o)?
        }
        Command::Analyze { common, forces, spectra } => {
            let (s, o) = load(common)?;
            let inputs = AnalyzeInputs { replicates: spectra.clone(), force_manifest: forces.clone() };
            pipeline::cmd_analyze(&s, &inputs, &o)?
        }
        Command::Relax { common, input } => {
            let (s, o) = load(common)?;
            pipeline::cmd_relax(&s, input, &o)?
        }
    };
    Ok(manifest)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(m) => {
            for a in &m.artifacts {
                println!("{a}");
            }
            if m.has_errors() {
                for e in &m.errors {
                    eprintln!("error: {}: {}", e.context, e.message);
                }
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
