use std::path::PathBuf;

use clap::ValueEnum;

use tanglekh::algebra::FieldSpec;
use tanglekh::ingest::DEFAULT_TOL;
use tanglekh::Functor;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Compute,
    Persist,
    Ingest,
    Oracle,
}

/// Everything one invocation needs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Subcommand,
    pub input: PathBuf,
    pub field: FieldSpec,
    pub functor: Functor,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub tol: f64,
    /// Include cycle representatives in homology reports.
    pub generators: bool,
    /// Test hook: flip the sign of the first crossing before computing
    /// homology, so the oracle must report a mismatch.
    pub corrupt_sign: bool,
}

impl RunConfig {
    pub fn new(command: Subcommand, input: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input: input.into(),
            field: FieldSpec::Prime { p: 2 },
            functor: Functor::Tangle,
            out: None,
            format: OutputFormat::Json,
            tol: DEFAULT_TOL,
            generators: false,
            corrupt_sign: false,
        }
    }

    pub fn check(&self) -> Result<(), CliError> {
        if !self.input.exists() {
            return Err(CliError::MissingInput(self.input.clone()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Tolerance(self.tol));
        }
        Ok(())
    }
}
