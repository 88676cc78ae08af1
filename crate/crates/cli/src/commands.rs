//! The four subcommands. Each `cmd_*` returns a process exit code; the
//! functions without the prefix return the report itself.

use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};

use tanglekh::algebra::FieldSpec;
use tanglekh::ingest::{ingest, CurveSet, EventsSidecar, IngestOutput};
use tanglekh::invariants::{betti_polynomial, jones_from_homology, state_sum};
use tanglekh::persistence::{BettiEntry, Filtration, FiltrationFile, PersistenceReport};
use tanglekh::{BigradedHomology, ChainComplex, Field, PrimeField, Rationals, Tangle, TangleDiagram};

use crate::config::{OutputFormat, RunConfig};
use crate::error::{exit, CliError};
use crate::report::{
    compute_bytes, emit, persist_bytes, to_json, ComputeReport, GeneratorBlock, OracleReport, Term,
};

/// Run `$body` with `$field` bound to the concrete field named by `$spec`.
macro_rules! with_field {
    ($spec:expr, |$field:ident| $body:expr) => {
        match $spec {
            FieldSpec::Rationals => {
                let $field = Rationals;
                $body
            }
            FieldSpec::Prime { p } => {
                let $field = PrimeField::new(p)?;
                $body
            }
        }
    };
}

/// Filtration and sidecar together, as printed when no output path is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub filtration: FiltrationFile,
    pub sidecar: EventsSidecar,
}

fn finish(result: Result<i32, CliError>) -> i32 {
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}

/// Load a diagram and check it is a valid tangle.
pub fn load_diagram(path: &Path) -> Result<TangleDiagram, CliError> {
    let wrap = |source| CliError::Diagram {
        path: path.to_owned(),
        source,
    };
    let d = TangleDiagram::from_path(path).map_err(wrap)?;
    Tangle::new(d.clone()).map_err(wrap)?;
    Ok(d)
}

pub fn compute(config: &RunConfig) -> Result<ComputeReport, CliError> {
    config.check()?;
    let d = load_diagram(&config.input)?;
    with_field!(config.field, |field| compute_with(&d, config, field))
}

fn compute_with<F: Field>(
    d: &TangleDiagram,
    config: &RunConfig,
    field: F,
) -> Result<ComputeReport, CliError> {
    let c = ChainComplex::build(d, config.functor, field)?;
    let h = BigradedHomology::compute(&c)?;
    let ranks = h.ranks();
    info!("{} nonzero homology blocks", ranks.len());
    let generators = config.generators.then(|| {
        ranks
            .iter()
            .map(|e| GeneratorBlock {
                p: e.p,
                q: e.q,
                representatives: h
                    .describe(&c, e.p, e.q)
                    .into_iter()
                    .map(|rep| {
                        rep.into_iter()
                            .map(|(coeff, g)| Term {
                                coeff,
                                generator: g.to_string(),
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect()
    });
    Ok(ComputeReport {
        field: h.field_spec().to_string(),
        functor: format!("{:?}", config.functor).to_lowercase(),
        crossings: d.crossings.len(),
        boundary_points: d.boundary.len(),
        betti: h
            .support()
            .into_iter()
            .map(|p| BettiEntry {
                p,
                betti: betti_polynomial(&h, p),
            })
            .collect(),
        jones: jones_from_homology(&h),
        ranks,
        generators,
    })
}

pub fn cmd_compute(config: &RunConfig) -> i32 {
    finish(compute(config).and_then(|report| {
        emit(config.out.as_deref(), &compute_bytes(&report, config.format)?)?;
        Ok(exit::SUCCESS)
    }))
}

pub fn persist(config: &RunConfig) -> Result<PersistenceReport, CliError> {
    config.check()?;
    let f = Filtration::load(&config.input)?;
    info!("filtration with {} diagrams, {} runs", f.len(), f.runs().len());
    with_field!(config.field, |field| Ok(f
        .compute(config.functor, field)?
        .report()))
}

pub fn cmd_persist(config: &RunConfig) -> i32 {
    finish(persist(config).and_then(|report| {
        emit(config.out.as_deref(), &persist_bytes(&report, config.format)?)?;
        Ok(exit::SUCCESS)
    }))
}

pub fn load_curves(path: &Path) -> Result<CurveSet, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Curves {
        path: path.to_owned(),
        source,
    })
}

pub fn ingest_curves(config: &RunConfig) -> Result<IngestOutput, CliError> {
    config.check()?;
    let set = load_curves(&config.input)?;
    Ok(ingest(&set, config.tol, None)?)
}

/// `x.json` becomes `x.events.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("events.json")
}

pub fn cmd_ingest(config: &RunConfig) -> i32 {
    finish((|| {
        if config.format == OutputFormat::Csv {
            return Err(CliError::Format("csv"));
        }
        let out = ingest_curves(config)?;
        let filtration = out.filtration.to_file();
        match &config.out {
            Some(path) => {
                emit(Some(path), &to_json(&filtration)?)?;
                emit(Some(&sidecar_path(path)), &to_json(&out.sidecar)?)?;
            }
            None => emit(
                None,
                &to_json(&IngestReport {
                    filtration,
                    sidecar: out.sidecar,
                })?,
            )?,
        }
        Ok(exit::SUCCESS)
    })())
}

pub fn oracle(config: &RunConfig) -> Result<OracleReport, CliError> {
    config.check()?;
    let d = load_diagram(&config.input)?;
    let mut built = d.clone();
    if config.corrupt_sign {
        if let Some(c) = built.crossings.first_mut() {
            c.sign = -c.sign;
        }
    }
    let (field, homology) = with_field!(config.field, |field| {
        let h = BigradedHomology::compute(&ChainComplex::build(&built, config.functor, field)?)?;
        (h.field_spec().to_string(), jones_from_homology(&h))
    });
    let state_sum = state_sum(&d).map_err(|source| CliError::Diagram {
        path: config.input.clone(),
        source,
    })?;
    Ok(OracleReport {
        field,
        agree: homology == state_sum,
        homology,
        state_sum,
    })
}

pub fn cmd_oracle(config: &RunConfig) -> i32 {
    finish(oracle(config).and_then(|report| {
        if config.format == OutputFormat::Csv {
            return Err(CliError::Format("csv"));
        }
        println!("homology:  {}", report.homology);
        println!("state sum: {}", report.state_sum);
        if let Some(path) = &config.out {
            emit(Some(path), &to_json(&report)?)?;
        }
        Ok(if report.agree {
            exit::SUCCESS
        } else {
            exit::MISMATCH
        })
    }))
}
