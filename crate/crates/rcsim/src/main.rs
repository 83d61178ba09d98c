//! Command-line harness for the reverberation-chamber RCS studies.
//!
//! Subcommands map one-to-one onto the orchestrated experiments in
//! [`rcsim::experiment`]; every run writes its artifacts (CSV tables plus a
//! `run-meta.json` with the resolved configuration and seed-derivation rule)
//! under `--out-dir`, so any result directory is reproducible on its own.
//!
//! Exit codes: 0 on success, 1 on configuration/usage errors, 2 on data
//! errors (unreadable or malformed input files).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rcsim::error::{Error, Result};
use rcsim::experiment::{run_from_measurements, run_pattern_experiment, run_shift_sweep};
use rcsim::io::{load_config, read_text, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "rcsim",
    version,
    about = "Monostatic RCS extraction in a reverberation chamber",
    long_about = "Simulates one-port reverberation-chamber measurements of a flat plate, \
                  extracts its radar cross section from loaded-minus-empty spectra with a \
                  matched-filter fit, and runs Monte Carlo studies of the stirrer shift \
                  between the two measurements. Also ingests measured Touchstone file pairs."
)]
struct Cli {
    /// JSON experiment configuration; omitted sections take built-in defaults
    /// (see `print-defaults`).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory receiving all output files (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out_dir: PathBuf,

    /// Override the configured number of Monte Carlo trials per cell.
    #[arg(long, global = true, value_name = "N")]
    seeds: Option<usize>,

    /// Zero the stirred-field strength (h_sigma = 0) for noise-free synthesis.
    #[arg(long, global = true)]
    noise_free: bool,

    /// Worker thread count; omit to use one thread per CPU core. Results are
    /// byte-identical regardless.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the full aspect-angle pattern with loaded and empty
    /// measurements at the same stirrer position; writes pattern.csv,
    /// waveform.csv, and run-meta.json.
    SimulatePattern,

    /// Monte Carlo study of the stirrer shift between the empty and loaded
    /// measurements; writes shift-summary.csv (means over trials),
    /// shift-summary-medians.csv, and run-meta.json.
    ShiftSweep,

    /// Extract a pattern from measured Touchstone one-port file pairs; file
    /// order defines the aspect angles via the configured sweep.
    ExtractFiles {
        /// Empty-chamber .s1p files, one per aspect angle, in sweep order.
        #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
        empty: Vec<PathBuf>,

        /// Loaded (target-present) .s1p files, paired with --empty by position.
        #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
        loaded: Vec<PathBuf>,

        /// Normalize the extracted pattern so its peak sits at the configured
        /// plate's theoretical boresight RCS (otherwise raw σ̂ is written).
        #[arg(long)]
        normalize_theory: bool,
    },

    /// Print the built-in default configuration as JSON to stdout and exit.
    PrintDefaults,
}

/// Resolve the effective configuration: file (or defaults), then CLI
/// overrides.
fn load_effective_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => load_config(&read_text(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = cli.seeds {
        if n == 0 {
            return Err(Error::config("--seeds must be >= 1"));
        }
        config.sweep.n_seeds = n;
    }
    if cli.noise_free {
        config.chamber.h_sigma = 0.0;
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::PrintDefaults => {
            print!("{}", ExperimentConfig::default().to_canonical_json());
            Ok(())
        }
        Command::SimulatePattern => {
            let config = load_effective_config(cli)?;
            let pattern = run_pattern_experiment(&config, &cli.out_dir, cli.jobs)?;
            println!(
                "extracted {} aspect angles; pattern.csv, waveform.csv, run-meta.json in {}",
                pattern.len(),
                cli.out_dir.display()
            );
            Ok(())
        }
        Command::ShiftSweep => {
            let config = load_effective_config(cli)?;
            let summary = run_shift_sweep(&config, &cli.out_dir, cli.jobs)?;
            println!(
                "swept {} stirrer shifts x {} trials; shift-summary.csv, \
                 shift-summary-medians.csv, run-meta.json in {}",
                summary.means.len(),
                config.sweep.n_seeds,
                cli.out_dir.display()
            );
            Ok(())
        }
        Command::ExtractFiles { empty, loaded, normalize_theory } => {
            let config = load_effective_config(cli)?;
            let pattern =
                run_from_measurements(empty, loaded, &config, &cli.out_dir, *normalize_theory)?;
            let n_failed = pattern.failed_flags().iter().filter(|&&f| f).count();
            println!(
                "extracted {} file pairs ({} flagged failed); pattern.csv, waveform.csv, \
                 run-meta.json in {}",
                pattern.len(),
                n_failed,
                cli.out_dir.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
