//! Serializable reports and the code that writes them.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use tanglekh::homology::RankEntry;
use tanglekh::persistence::{BettiEntry, PersistenceReport};
use tanglekh::LaurentPoly;

use crate::config::OutputFormat;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: String,
    pub generator: String,
}

/// Cycle representatives of one homology block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorBlock {
    pub p: i64,
    pub q: i64,
    pub representatives: Vec<Vec<Term>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComputeReport {
    pub field: String,
    pub functor: String,
    pub crossings: usize,
    pub boundary_points: usize,
    pub ranks: Vec<RankEntry>,
    pub betti: Vec<BettiEntry>,
    pub jones: LaurentPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<GeneratorBlock>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub field: String,
    pub homology: LaurentPoly,
    pub state_sum: LaurentPoly,
    pub agree: bool,
}

/// Write `bytes` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Write {
            path: path.to_owned(),
            source,
        }),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            }),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| CliError::Write {
        path: "<csv buffer>".into(),
        source: e.into_error(),
    })
}

/// Rank rows `p,q,rank` in CSV.
pub fn compute_bytes(report: &ComputeReport, format: OutputFormat) -> Result<Vec<u8>, CliError> {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => to_csv(&report.ranks),
    }
}

/// One row per bar in CSV; `death` is empty for bars alive at the end of
/// their run.
pub fn persist_bytes(
    report: &PersistenceReport,
    format: OutputFormat,
) -> Result<Vec<u8>, CliError> {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => to_csv(&report.bars),
    }
}
