//! From 3-D curves to disk-radius filtrations of tangle diagrams.
//!
//! Curves are projected along a coordinate axis, crossings are found by
//! pairwise segment intersection, and the arrangement is clipped by disks of
//! growing radius around a center. Consecutive clips with the same crossings
//! are related by closure morphisms read off the curve geometry; anything else
//! becomes a run boundary.

mod clip;
mod events;
mod filtration;
mod geometry;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::DiagramError;

pub use clip::{clip, ClippedTangle, ComponentRegistry, EndpointRecord, PieceRecord};
pub use events::{critical_radii, sample_grades, EventCause, FiltrationEvent};
pub use filtration::{
    build_filtration, ingest, BoundaryCause, BoundaryRecord, EventsSidecar, IngestOutput,
    Perturbation,
};
pub use geometry::{
    project_and_detect, Axis, CrossingRecord, GenericityReport, PlanarArrangement, Strand,
    StrandPoint,
};

/// Default relative tolerance for genericity and degeneracy checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    #[serde(default)]
    pub closed: bool,
    pub points: Vec<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    #[serde(default)]
    pub axis: Axis,
    /// In projection-plane coordinates.
    #[serde(default)]
    pub center: [f64; 2],
    pub curves: Vec<Curve>,
}

impl CurveSet {
    pub fn from_json(text: &str) -> Result<Self, IngestError> {
        let set: CurveSet = serde_json::from_str(text)?;
        set.check()?;
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn check(&self) -> Result<(), IngestError> {
        if self.curves.is_empty() {
            return Err(IngestError::NoCurves);
        }
        for (i, c) in self.curves.iter().enumerate() {
            let needed = if c.closed { 3 } else { 2 };
            if c.points.len() < needed {
                return Err(IngestError::TooFewPoints { curve: i, needed });
            }
            let n = c.points.len();
            let pairs = if c.closed { n } else { n - 1 };
            if let Some(k) = (0..pairs).find(|&k| c.points[k] == c.points[(k + 1) % n]) {
                return Err(IngestError::RepeatedPoint { curve: i, index: k });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    TriplePoint,
    Tangential,
    CoincidentDepth,
    Overlap,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("curve set is empty")]
    NoCurves,
    #[error("curve {curve} needs at least {needed} points")]
    TooFewPoints { curve: usize, needed: usize },
    #[error("curve {curve} repeats point {index}")]
    RepeatedPoint { curve: usize, index: usize },
    #[error("non-generic projection ({kind:?}) near ({:.6}, {:.6})", position[0], position[1])]
    NonGeneric { kind: Degeneracy, position: [f64; 2] },
    #[error("radius {radius} is within tolerance of the critical radius {critical}")]
    DegenerateRadius { radius: f64, critical: f64 },
    #[error("open curve {curve} ends inside the disk of radius {radius}")]
    LooseEnd { curve: usize, radius: f64 },
    #[error("grade {0} does not exceed its predecessor")]
    GradesNotIncreasing(usize),
    #[error("clipped diagram at radius {radius} is invalid: {source}")]
    Diagram { radius: f64, source: DiagramError },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
}

impl IngestError {
    /// Genericity failures are the ones a caller may fix by perturbing input.
    pub fn is_genericity(&self) -> bool {
        matches!(
            self,
            IngestError::NonGeneric { .. } | IngestError::DegenerateRadius { .. }
        )
    }
}
