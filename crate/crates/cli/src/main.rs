use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rossby_core::harness::{run, ConfigBuilder, Mode};
use rossby_core::Error;

#[derive(Parser)]
#[command(name = "rossby", version, about = "Rotating density-dependent Euler flows on the 2D torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the primitive system at one Rossby number.
    RunPrimitive(Common),
    /// Integrate the quasi-homogeneous limit system.
    RunQh(Common),
    /// Compare a list of Rossby numbers against the limit system.
    SweepEps(Common),
    /// Measure lifespans over a list of fluctuation sizes.
    SweepDelta(Common),
    /// Run the Picard iteration and compare it with the direct stepper.
    Picard(Common),
    /// Littlewood-Paley diagnostics of the initial data.
    Besov(Common),
    /// Relative-entropy comparison of two resolutions.
    StabilityTwin(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set n=64`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Command {
    fn split(self) -> (Mode, Common) {
        match self {
            Command::RunPrimitive(c) => (Mode::RunPrimitive, c),
            Command::RunQh(c) => (Mode::RunQh, c),
            Command::SweepEps(c) => (Mode::SweepEps, c),
            Command::SweepDelta(c) => (Mode::SweepDelta, c),
            Command::Picard(c) => (Mode::Picard, c),
            Command::Besov(c) => (Mode::Besov, c),
            Command::StabilityTwin(c) => (Mode::StabilityTwin, c),
        }
    }
}

fn execute(mode: Mode, args: Common) -> Result<i32, Error> {
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::config(0, format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut builder = ConfigBuilder::parse(&text)?;
    builder.set(&format!("mode={}", mode.as_str()))?;
    for o in &args.overrides {
        builder.set(o)?;
    }
    if let Some(seed) = args.seed {
        builder.set(&format!("seed={seed}"))?;
    }
    if let Some(out) = &args.out {
        builder.set(&format!("out_dir={}", out.display()))?;
    }
    let config = builder.build()?;
    let summary = run(&config)?;
    if let rossby_core::harness::Outcome::BlowUp(t) = summary.outcome {
        eprintln!("blow-up proxy fired at t = {t}");
    }
    Ok(summary.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (mode, args) = Cli::parse().command.split();
    let code = match execute(mode, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
