//! Command-line front end. Exit codes: 0 success, 1 run or validation
//! failure, 2 usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::InitialState;
use crate::model::System;
use crate::sweep::{
    cmd_evolve, cmd_montecarlo, cmd_sweep_ratio, write_rows, write_summary, Engine, Format,
    RunConfig, RunError,
};
use crate::validate::{run_validation, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "nh-entangle",
    version,
    about = "Dissipation-accelerated entanglement of a decaying qubit with lossless partners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time series of the no-jump state.
    Evolve(Common),
    /// Entangling time and success probability over a range of R.
    SweepRatio(Common),
    /// Quantum-jump trajectories compared with the no-jump probability.
    Montecarlo(Common),
    /// Run the self-check suite.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SystemArg {
    #[value(name = "2q")]
    Two,
    #[value(name = "3q")]
    Three,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitialArg {
    Nh,
    Herm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Analytic,
    Numeric,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    system: Option<SystemArg>,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    #[arg(long)]
    lambda: Option<f64>,
    /// R = κ/(4λ)
    #[arg(long, conflicts_with = "kappa", allow_negative_numbers = true)]
    ratio: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// lo:hi:step
    #[arg(long)]
    ratio_range: Option<String>,
    /// Final time as λt.
    #[arg(long, allow_negative_numbers = true)]
    tmax: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    #[arg(long)]
    trajectories: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Coarser grids.
    #[arg(long)]
    quick: bool,
    /// Check the typeset three-qubit formulas (D, overdamped W time, P) instead of
    /// the corrected ones; expected to fail.
    #[arg(long)]
    use_printed_3q: bool,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn flags(&self) -> RunConfig {
        RunConfig {
            system: self.system.map(|s| match s {
                SystemArg::Two => System::TwoQubit,
                SystemArg::Three => System::ThreeQubit,
            }),
            initial: self.initial.map(|i| match i {
                InitialArg::Nh => InitialState::NhExcited,
                InitialArg::Herm => InitialState::HermitianExcited,
            }),
            lambda: self.lambda,
            ratio: self.ratio,
            kappa: self.kappa,
            ratio_range: self.ratio_range.clone(),
            tmax: self.tmax,
            steps: self.steps,
            engine: self.engine.map(|e| match e {
                EngineArg::Analytic => Engine::Analytic,
                EngineArg::Numeric => Engine::Numeric,
            }),
            trajectories: self.trajectories,
            seed: self.seed,
            format: self.format.map(format_of),
            out: self.out.clone(),
        }
    }

    fn resolve(&self) -> Result<RunConfig, RunError> {
        let base = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        Ok(base.overridden_by(self.flags()))
    }
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn exit_code(err: &RunError) -> i32 {
    match err {
        RunError::Config(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn open_output(out: Option<&PathBuf>) -> std::io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run_command(command: &Command) -> Result<i32, RunError> {
    match command {
        Command::Evolve(c) => {
            let cfg = c.resolve()?;
            let rows = cmd_evolve(&cfg)?;
            let mut out = open_output(cfg.out.as_ref())?;
            write_rows(&mut out, &rows, cfg.format(), "evolve", &cfg)?;
            out.flush()?;
        }
        Command::SweepRatio(c) => {
            let cfg = c.resolve()?;
            let rows = cmd_sweep_ratio(&cfg)?;
            let mut out = open_output(cfg.out.as_ref())?;
            write_rows(&mut out, &rows, cfg.format(), "sweep-ratio", &cfg)?;
            out.flush()?;
        }
        Command::Montecarlo(c) => {
            let cfg = c.resolve()?;
            let summary = cmd_montecarlo(&cfg)?;
            let mut out = open_output(cfg.out.as_ref())?;
            write_summary(&mut out, &summary, &cfg)?;
            out.flush()?;
        }
        Command::Validate(v) => {
            let report = run_validation(ValidateOptions {
                quick: v.quick,
                use_printed_3q: v.use_printed_3q,
            });
            let mut out = open_output(v.out.as_ref())?;
            match v.format.map(format_of) {
                Some(Format::Json) => {
                    serde_json::to_writer_pretty(&mut out, &report)?;
                    writeln!(out)?;
                }
                _ => out.write_all(report.render().as_bytes())?,
            }
            out.flush()?;
            return Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAILURE
            });
        }
    }
    Ok(EXIT_OK)
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run_command(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
