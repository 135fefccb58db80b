use std::process::ExitCode;

use clap::{Parser, Subcommand};

use edsat_cli::commands::run;
use edsat_cli::config::{Command, Flags, RunConfig};
use edsat_cli::report::write_output;
use edsat_cli::CliError;

/// Self-consistent spectra with energy-dependent potentials.
#[derive(Parser)]
#[command(name = "edsat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Deformed levels E(n) for n up to --n-max
    Spectrum(Flags),
    /// Quarkonium masses per lambda with experimental comparison
    Masses(Flags),
    /// Fitted (k^2, p^2) per lambda
    Fit(Flags),
    /// Numerical transform against its closed form
    XformCheck(Flags),
}

fn execute(command: Command, flags: &Flags) -> Result<(), CliError> {
    let config = RunConfig::resolve(command, flags)?;
    if let Some(path) = &flags.emit_config {
        write_output(Some(path), &config.to_json())
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    }
    let report = run(&config)?;
    for msg in &report.messages {
        eprintln!("{msg}");
    }
    write_output(config.output_path.as_deref(), report.csv.as_str())
        .map_err(|e| CliError::Io(format!("writing output: {e}")))?;
    report.status
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (command, flags) = match &cli.command {
        Sub::Spectrum(f) => (Command::Spectrum, f),
        Sub::Masses(f) => (Command::Masses, f),
        Sub::Fit(f) => (Command::Fit, f),
        Sub::XformCheck(f) => (Command::XformCheck, f),
    };
    match execute(command, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edsat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
