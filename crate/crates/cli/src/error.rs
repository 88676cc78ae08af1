use std::io;
use std::path::PathBuf;

use thiserror::Error;

use tanglekh::algebra::FieldError;
use tanglekh::complex::ComplexError;
use tanglekh::diagram::DiagramError;
use tanglekh::homology::HomologyError;
use tanglekh::ingest::IngestError;
use tanglekh::persistence::FiltrationError;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const MISMATCH: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const GENERICITY: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input file {0} does not exist")]
    MissingInput(PathBuf),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Diagram { path: PathBuf, source: DiagramError },
    #[error("{path}: malformed curve file: {source}")]
    Curves {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("{0} output is not available for this command")]
    Format(&'static str),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Ingest(e) if e.is_genericity() => exit::GENERICITY,
            _ => exit::VALIDATION,
        }
    }
}
