//! Filtrations by growing disks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clip::{clip_with, ClippedTangle, ComponentRegistry};
use super::events::{critical_radii, sample_grades, EventCause, FiltrationEvent};
use super::geometry::{project_and_detect, PlanarArrangement};
use super::{CurveSet, IngestError};
use crate::diagram::Tangle;
use crate::persistence::{
    ClosedArc, ClosureMorphismSpec, ComponentMap, EndpointFate, Filtration, NewComponent, Step,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub index: usize,
    pub from: f64,
    pub to: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCause {
    CrossingBirth { crossings: Vec<i64> },
    /// No injective component map exists between the two clips.
    Merge { detail: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    /// Index of the step, between grades `step` and `step + 1`.
    pub step: usize,
    pub from_radius: f64,
    pub to_radius: f64,
    pub cause: BoundaryCause,
}

/// Everything about an ingestion that the filtration itself does not carry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventsSidecar {
    pub center: [f64; 2],
    pub scale: f64,
    pub tol: f64,
    pub events: Vec<FiltrationEvent>,
    pub grades: Vec<f64>,
    pub perturbed: Vec<Perturbation>,
    pub boundaries: Vec<BoundaryRecord>,
    /// Sampled grades at or beyond this radius were dropped because an open
    /// curve ends inside them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated_at: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IngestOutput {
    pub filtration: Filtration,
    pub clips: Vec<ClippedTangle>,
    pub sidecar: EventsSidecar,
}

/// The fate of an endpoint of the smaller clip, found by walking outward
/// along its strand until it meets either circle.
fn fate(pa: &PlanarArrangement, small: &ComponentRegistry, large: &ComponentRegistry, i: usize) -> Option<EndpointFate> {
    let e = &small.endpoints[i];
    let s = &pa.strands[e.strand];
    let len = s.length();
    let dir = if e.entering { -1.0 } else { 1.0 };
    let ahead = |h: f64| {
        let d = dir * (h - e.param);
        if s.closed {
            d.rem_euclid(len)
        } else {
            d
        }
    };
    let best = |hits: &[(f64, usize)]| {
        hits.iter()
            .map(|&(h, j)| (ahead(h), j))
            .filter(|&(d, _)| d > 0.0)
            .min_by(|x, y| x.0.total_cmp(&y.0))
    };
    match (best(&small.hits[e.strand]), best(&large.hits[e.strand])) {
        (Some((ds, j)), Some((dl, _))) if ds < dl => Some(EndpointFate::Joined(j)),
        (_, Some((_, j))) => Some(EndpointFate::Outer(j)),
        (Some((_, j)), None) => Some(EndpointFate::Joined(j)),
        (None, None) => None,
    }
}

/// Closure morphism between two clips with the same crossings, read off the
/// geometry. Validity is checked separately.
fn closure_spec(
    pa: &PlanarArrangement,
    small: &ComponentRegistry,
    large: &ComponentRegistry,
) -> Result<ClosureMorphismSpec, String> {
    let endpoints: Vec<EndpointFate> = (0..small.endpoints.len())
        .map(|i| fate(pa, small, large, i).ok_or_else(|| format!("endpoint {i} leads nowhere")))
        .collect::<Result<_, _>>()?;
    let large_free = |strand: usize| large.free_circles.iter().position(|&s| s == strand);
    let free_circles = small
        .free_circles
        .iter()
        .map(|&s| large_free(s).ok_or_else(|| format!("free circle on strand {s} vanished")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut closed_arcs = Vec::new();
    for p in &small.pieces {
        let Some([a, b]) = p.endpoints else { continue };
        if p.crossings.is_empty() && endpoints[a] == EndpointFate::Joined(b) {
            if let Some(f) = large_free(p.strand) {
                closed_arcs.push(ClosedArc {
                    endpoints: [a.min(b), a.max(b)],
                    free_circle: f,
                });
            }
        }
    }
    let mut used = vec![false; large.endpoints.len()];
    for f in &endpoints {
        if let EndpointFate::Outer(j) = *f {
            used[j] = true;
        }
    }
    let mut new = Vec::new();
    for p in &large.pieces {
        if let Some([a, b]) = p.endpoints {
            if !used[a] && !used[b] {
                new.push(NewComponent::Arc {
                    endpoints: [a.min(b), a.max(b)],
                });
            }
        }
    }
    let touched: Vec<usize> = small
        .pieces
        .iter()
        .map(|p| p.strand)
        .chain(small.free_circles.iter().copied())
        .collect();
    for (f, &s) in large.free_circles.iter().enumerate() {
        if !touched.contains(&s) {
            new.push(NewComponent::Circle {
                free_circle: f,
                from_arc: false,
            });
        }
    }
    Ok(ClosureMorphismSpec {
        component_map: ComponentMap {
            endpoints,
            free_circles,
            closed_arcs,
        },
        new,
    }
    .normalized())
}

fn step_between(
    pa: &PlanarArrangement,
    small: &ClippedTangle,
    large: &ClippedTangle,
) -> Result<Step, BoundaryCause> {
    let (ids_s, ids_l) = (small.registry.crossing_ids(), large.registry.crossing_ids());
    if ids_s != ids_l {
        let crossings = ids_l.into_iter().filter(|i| !ids_s.contains(i)).collect();
        return Err(BoundaryCause::CrossingBirth { crossings });
    }
    let merge = |detail: String| BoundaryCause::Merge { detail };
    let spec = closure_spec(pa, &small.registry, &large.registry).map_err(merge)?;
    let src = Tangle::new(small.diagram.clone()).map_err(|e| merge(e.to_string()))?;
    let dst = Tangle::new(large.diagram.clone()).map_err(|e| merge(e.to_string()))?;
    spec.validate(&src, &dst).map_err(|e| merge(e.to_string()))?;
    Ok(Step::Closure(spec))
}

/// Clip at every grade and connect consecutive clips by closure morphisms,
/// or by run boundaries where none exists.
pub fn build_filtration(
    pa: &PlanarArrangement,
    center: [f64; 2],
    grades: &[f64],
) -> Result<IngestOutput, IngestError> {
    let events = critical_radii(pa, center);
    let eps = pa.eps();
    let mut grades = grades.to_vec();
    let mut perturbed = Vec::new();
    for (index, g) in grades.iter_mut().enumerate() {
        let from = *g;
        while let Some(e) = events.iter().find(|e| e.contains(*g, eps)) {
            *g = e.upper + 2.0 * eps;
        }
        if *g != from {
            log::warn!("grade {from} is critical; moved to {g}");
            perturbed.push(Perturbation { index, from, to: *g });
        }
    }
    if let Some(i) = (1..grades.len()).find(|&i| grades[i] <= grades[i - 1]) {
        return Err(IngestError::GradesNotIncreasing(i));
    }
    let clips: Vec<ClippedTangle> = grades
        .par_iter()
        .map(|&r| clip_with(pa, center, r, &events))
        .collect::<Result<_, _>>()?;
    for c in &clips {
        Tangle::new(c.diagram.clone()).map_err(|source| IngestError::Diagram {
            radius: c.registry.radius,
            source,
        })?;
    }
    let outcomes: Vec<Result<Step, BoundaryCause>> = clips
        .par_windows(2)
        .map(|w| step_between(pa, &w[0], &w[1]))
        .collect();
    let mut steps = Vec::with_capacity(outcomes.len());
    let mut boundaries = Vec::new();
    for (step, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(s) => steps.push(s),
            Err(cause) => {
                let reason = match &cause {
                    BoundaryCause::CrossingBirth { crossings } => {
                        format!("crossing birth {crossings:?}")
                    }
                    BoundaryCause::Merge { detail } => format!("merge: {detail}"),
                };
                steps.push(Step::Boundary { reason });
                boundaries.push(BoundaryRecord {
                    step,
                    from_radius: grades[step],
                    to_radius: grades[step + 1],
                    cause,
                });
            }
        }
    }
    let filtration = Filtration::new(
        grades.clone(),
        clips.iter().map(|c| c.diagram.clone()).collect(),
        steps,
    )
    .expect("shape is consistent by construction");
    Ok(IngestOutput {
        filtration,
        clips,
        sidecar: EventsSidecar {
            center,
            scale: pa.scale,
            tol: pa.tol,
            events,
            grades,
            perturbed,
            boundaries,
            truncated_at: None,
        },
    })
}

/// Project, detect and filter in one go. Without explicit grades, the
/// sampled grades stop short of the first open curve end.
pub fn ingest(set: &CurveSet, tol: f64, grades: Option<Vec<f64>>) -> Result<IngestOutput, IngestError> {
    let pa = project_and_detect(set, tol)?;
    let (grades, truncated_at) = match grades {
        Some(g) => (g, None),
        None => {
            let events = critical_radii(&pa, set.center);
            let mut g = sample_grades(&events);
            let open = events
                .iter()
                .find(|e| e.causes.iter().any(|c| matches!(c, EventCause::OpenEnd { .. })))
                .map(|e| e.radius);
            if let Some(r) = open {
                g.retain(|&x| x < r);
            }
            (g, open)
        }
    };
    let mut out = build_filtration(&pa, set.center, &grades)?;
    out.sidecar.truncated_at = truncated_at;
    Ok(out)
}
