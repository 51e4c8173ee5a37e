use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use floquet_tls_cli::{cmd_evolve, cmd_heatpump, cmd_spectrum, cmd_verify, CliError, RunConfig};

/// Floquet–Markov master equation for a laser-driven two-level atom.
#[derive(Debug, Parser)]
#[command(name = "floquet-tls", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; each command has a built-in default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Random seed for `verify`, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Resonance fluorescence spectrum (spectrum.csv, spectrum_lines.csv).
    Spectrum,
    /// Stationary heat-pump currents (thermo.csv, sweep.csv).
    Heatpump,
    /// Master-equation trajectory (evolve.csv).
    Evolve,
    /// Randomized invariant suites (verify.txt).
    Verify,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match (&cli.config, cli.command) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Command::Heatpump) => RunConfig::heatpump_default(),
        (None, _) => RunConfig::fluorescence_default(),
    };
    if let Some(seed) = cli.seed {
        cfg.verify.seed = seed;
    }
    let outcome = match cli.command {
        Command::Spectrum => cmd_spectrum(&cfg, &cli.out)?,
        Command::Heatpump => cmd_heatpump(&cfg, &cli.out)?,
        Command::Evolve => cmd_evolve(&cfg, &cli.out)?,
        Command::Verify => {
            let (report, outcome) = cmd_verify(&cfg, &cli.out)?;
            print!("{}", report.table());
            let failed = report.failures().count();
            if failed > 0 {
                return Err(CliError::VerificationFailed(failed));
            }
            outcome
        }
    };
    for line in &outcome.summary {
        println!("{line}");
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
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
