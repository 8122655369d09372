//! `triplewalk`: quantum walks on a chain with a side chain attached.
//!
//! Exit status: 0 on success, 1 on I/O failure or failed checks, 2 on invalid
//! parameters.

mod commands;
mod config;
mod error;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use triplewalk::Execution;

use crate::config::{ParamList, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "triplewalk",
    version,
    about = "Continuous-time quantum walks on triple graphs"
)]
struct Cli {
    /// Flat `key = value` file with defaults; keys are the long flag names.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for default output files [env: TRIPLEWALK_OUT_DIR] [default: .]
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Disable data-parallel evaluation.
    #[arg(long, global = true)]
    sequential: bool,

    /// Print the merged configuration in config-file form and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a walker and write regional probabilities as CSV.
    Evolve(EvolveArgs),
    /// Write the spectrum and level-equation analysis as JSON.
    Spectrum(SpectrumArgs),
    /// Evaluate the switching verdict over a parameter grid.
    ///
    /// Grid flags accept lists and inclusive ranges, e.g. `--l 2..10` or
    /// `--s 1,3`. Defaults: N=11, l=2..10, S=1..4, J=10.
    Sweep(SweepArgs),
    /// Run the built-in checks and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SpecArgs {
    /// Main-chain length N [default: 11].
    #[arg(long)]
    n: Option<ParamList<usize>>,
    /// Attachment site, 1-based [default: 5].
    #[arg(long)]
    l: Option<ParamList<usize>>,
    /// Side-chain length S [default: 1].
    #[arg(long)]
    s: Option<ParamList<usize>>,
    /// Side-chain hopping J [default: 10].
    #[arg(long, allow_negative_numbers = true)]
    j: Option<ParamList<f64>>,
}

#[derive(Args)]
struct DynamicsArgs {
    /// Initial site [default: 3].
    #[arg(long)]
    start: Option<usize>,
    /// Final time [default: 100].
    #[arg(long, allow_negative_numbers = true)]
    horizon: Option<f64>,
    /// Sampling step [default: 0.05].
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Switching threshold on the opposite-side probability [default: 0.05].
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    /// CSV path, or `-` for standard output [default: <out-dir>/evolve.csv].
    #[arg(long)]
    out: Option<String>,
    /// Also write an SVG plot of p_left and p_right.
    #[arg(long, value_name = "FILE")]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// JSON path, or `-` for standard output [default: <out-dir>/spectrum.json].
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    /// CSV path, or `-` for standard output [default: <out-dir>/sweep.csv].
    #[arg(long)]
    out: Option<String>,
    /// Summary JSON path [default: <out-dir>/sweep_summary.json].
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the named check.
    #[arg(long, value_name = "CHECK")]
    only: Option<String>,
}

impl SpecArgs {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.n = self.n;
        cfg.l = self.l;
        cfg.s = self.s;
        cfg.j = self.j;
    }
}

impl DynamicsArgs {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.start = self.start;
        cfg.horizon = self.horizon;
        cfg.dt = self.dt;
        cfg.threshold = self.threshold;
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Evolve,
    Spectrum,
    Sweep,
    Verify,
}

/// The settings given on the command line, as a config layer.
fn flag_layer(command: Command, out_dir: Option<PathBuf>) -> (RunConfig, Kind) {
    let mut cfg = RunConfig {
        out_dir,
        ..RunConfig::default()
    };
    let kind = match command {
        Command::Evolve(a) => {
            a.spec.apply(&mut cfg);
            a.dynamics.apply(&mut cfg);
            cfg.out = a.out;
            cfg.plot = a.plot;
            Kind::Evolve
        }
        Command::Spectrum(a) => {
            a.spec.apply(&mut cfg);
            cfg.out = a.out;
            Kind::Spectrum
        }
        Command::Sweep(a) => {
            a.spec.apply(&mut cfg);
            a.dynamics.apply(&mut cfg);
            cfg.out = a.out;
            cfg.summary = a.summary;
            Kind::Sweep
        }
        Command::Verify(a) => {
            cfg.only = a.only;
            Kind::Verify
        }
    };
    (cfg, kind)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let (flags, kind) = flag_layer(cli.command, cli.out_dir);
    let cfg = file.overlay(flags);
    if cli.print_config {
        print!("{}", cfg.emit());
        return Ok(true);
    }
    match kind {
        Kind::Evolve => commands::evolve(&cfg, exec).map(|()| true),
        Kind::Spectrum => commands::spectrum(&cfg).map(|()| true),
        Kind::Sweep => commands::sweep(&cfg, exec).map(|()| true),
        Kind::Verify => commands::verify(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
