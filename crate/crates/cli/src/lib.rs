//! Command-line front end: argument parsing, file I/O and reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Parser};

use tanglekh::algebra::FieldSpec;
use tanglekh::ingest::DEFAULT_TOL;
use tanglekh::Functor;

pub use commands::{cmd_compute, cmd_ingest, cmd_oracle, cmd_persist};
pub use config::{OutputFormat, RunConfig, Subcommand};
pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "tanglekh",
    version,
    about = "Khovanov homology of tangle diagrams and persistence along filtrations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Coefficient field: q, f2 or fp:<prime>.
    #[arg(long, global = true, default_value = "f2")]
    field: FieldSpec,
    /// g for the tangle functor, f for the link functor.
    #[arg(long, global = true, default_value = "g")]
    functor: Functor,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Geometric tolerance for curve ingestion, relative to the curve scale.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Include cycle representatives in homology reports.
    #[arg(long, global = true)]
    generators: bool,
    #[arg(long, global = true, hide = true)]
    corrupt_sign: bool,
    /// Repeat for more log output on standard error.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Bigraded homology, Betti and Jones polynomials of a diagram file.
    Compute { input: PathBuf },
    /// Barcodes of a filtration file.
    Persist { input: PathBuf },
    /// Turn a curve file into a filtration and an events sidecar.
    Ingest { input: PathBuf },
    /// Compare the Jones polynomial from homology with the state sum.
    Oracle { input: PathBuf },
}

impl Cli {
    fn into_config(self) -> RunConfig {
        let (command, input) = match self.command {
            Command::Compute { input } => (Subcommand::Compute, input),
            Command::Persist { input } => (Subcommand::Persist, input),
            Command::Ingest { input } => (Subcommand::Ingest, input),
            Command::Oracle { input } => (Subcommand::Oracle, input),
        };
        RunConfig {
            command,
            input,
            field: self.field,
            functor: self.functor,
            out: self.out,
            format: self.format,
            tol: self.tol,
            generators: self.generators,
            corrupt_sign: self.corrupt_sign,
        }
    }
}

pub fn dispatch(config: &RunConfig) -> i32 {
    match config.command {
        Subcommand::Compute => cmd_compute(config),
        Subcommand::Persist => cmd_persist(config),
        Subcommand::Ingest => cmd_ingest(config),
        Subcommand::Oracle => cmd_oracle(config),
    }
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::VALIDATION } else { exit::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    dispatch(&cli.into_config())
}
