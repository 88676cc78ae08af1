//! Intersecting an arrangement with a disk.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::events::{critical_radii, FiltrationEvent};
use super::geometry::{dot, sub, PlanarArrangement, Strand};
use super::IngestError;
use crate::diagram::{Crossing, Label, TangleDiagram};

/// A boundary endpoint of the clipped tangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointRecord {
    pub strand: usize,
    pub param: f64,
    pub angle: f64,
    /// The strand enters the disk here, in parameter order.
    pub entering: bool,
}

/// A maximal piece of a strand inside the disk. Closed pieces wrap around
/// with `end < start` when they pass the strand's parameter origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub strand: usize,
    pub start: f64,
    pub end: f64,
    /// Entry and exit endpoints; `None` for a strand wholly inside.
    pub endpoints: Option<[usize; 2]>,
    /// Crossing ids met along the piece, in order.
    pub crossings: Vec<i64>,
}

/// Where every part of the clipped diagram came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRegistry {
    pub radius: f64,
    pub endpoints: Vec<EndpointRecord>,
    pub pieces: Vec<PieceRecord>,
    /// Source strand of each free circle.
    pub free_circles: Vec<usize>,
    /// Per strand, circle-crossing parameters with their endpoint index.
    pub hits: Vec<Vec<(f64, usize)>>,
}

impl ComponentRegistry {
    pub fn crossing_ids(&self) -> Vec<i64> {
        let mut ids: Vec<i64> = self.pieces.iter().flat_map(|p| p.crossings.iter().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClippedTangle {
    pub diagram: TangleDiagram,
    pub registry: ComponentRegistry,
}

/// Parameters where the strand meets the circle, ascending.
fn circle_hits(s: &Strand, center: [f64; 2], radius: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 0..s.segment_count() {
        let (a, b) = s.segment(k);
        let (w, d) = (sub(a, center), sub(b, a));
        let qa = dot(d, d);
        let qb = 2.0 * dot(w, d);
        let qc = dot(w, w) - radius * radius;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            continue;
        }
        let root = disc.sqrt();
        let mut ts = [(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)];
        ts.sort_by(f64::total_cmp);
        out.extend(ts.into_iter().filter(|t| (0.0..1.0).contains(t)).map(|t| k as f64 + t));
    }
    out
}

/// Does `x` lie strictly inside the cyclic or plain parameter interval?
pub(crate) fn in_interval(x: f64, start: f64, end: f64) -> bool {
    if start <= end {
        x > start && x < end
    } else {
        x > start || x < end
    }
}

fn port(id: i64, slot: usize) -> Label {
    Label::Str(format!("x{id}.{slot}"))
}

/// Clip at a radius that must avoid every critical radius.
pub fn clip(pa: &PlanarArrangement, center: [f64; 2], radius: f64) -> Result<ClippedTangle, IngestError> {
    clip_with(pa, center, radius, &critical_radii(pa, center))
}

pub(crate) fn clip_with(
    pa: &PlanarArrangement,
    center: [f64; 2],
    radius: f64,
    events: &[FiltrationEvent],
) -> Result<ClippedTangle, IngestError> {
    let eps = pa.eps();
    if let Some(e) = events.iter().find(|e| e.contains(radius, eps)) {
        return Err(IngestError::DegenerateRadius {
            radius,
            critical: e.radius,
        });
    }
    let dist = |p: [f64; 2]| {
        let d = sub(p, center);
        dot(d, d).sqrt()
    };
    let inside = |s: &Strand, param: f64| dist(s.point_at(param)) < radius;

    // crossing occurrences per strand: (param, id, incoming slot, outgoing slot)
    let mut occurrences: Vec<Vec<(f64, i64, usize, usize)>> = vec![Vec::new(); pa.strands.len()];
    let mut crossings = Vec::new();
    for c in pa.crossings.iter().filter(|c| dist(c.position) < radius) {
        occurrences[c.under.strand].push((c.under.param, c.id, 0, 2));
        let (i, o) = if c.sign > 0 { (3, 1) } else { (1, 3) };
        occurrences[c.over.strand].push((c.over.param, c.id, i, o));
        crossings.push(Crossing {
            id: c.id,
            ports: std::array::from_fn(|k| port(c.id, k)),
            sign: c.sign,
        });
    }
    for occ in &mut occurrences {
        occ.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    // raw pieces: (strand, start, end, bounded)
    let mut raw = Vec::new();
    let mut whole = Vec::new();
    let mut strand_hits = Vec::with_capacity(pa.strands.len());
    for (si, s) in pa.strands.iter().enumerate() {
        let hits = circle_hits(s, center, radius);
        let len = s.length();
        if hits.is_empty() {
            if inside(s, 0.0) {
                if !s.closed {
                    return Err(IngestError::LooseEnd { curve: s.curve, radius });
                }
                whole.push(si);
            }
        } else if s.closed {
            let m = hits.len();
            for i in 0..m {
                let (a, b) = (hits[i], hits[(i + 1) % m]);
                let mid = if b > a { (a + b) / 2.0 } else { ((a + b + len) / 2.0) % len };
                if inside(s, mid) {
                    raw.push((si, a, b));
                }
            }
        } else {
            let ends = [0.0].into_iter().chain(hits.iter().copied()).chain([len]);
            let ends: Vec<f64> = ends.collect();
            for (i, w) in ends.windows(2).enumerate() {
                if inside(s, (w[0] + w[1]) / 2.0) {
                    if i == 0 || i == ends.len() - 2 {
                        return Err(IngestError::LooseEnd { curve: s.curve, radius });
                    }
                    raw.push((si, w[0], w[1]));
                }
            }
        }
        strand_hits.push(hits);
    }

    // endpoints in angular order
    let mut ends: Vec<EndpointRecord> = raw
        .iter()
        .flat_map(|&(si, a, b)| {
            let s = &pa.strands[si];
            [(a, true), (b, false)].map(|(param, entering)| EndpointRecord {
                strand: si,
                param,
                angle: pa.angle(s.point_at(param)),
                entering,
            })
        })
        .collect();
    ends.sort_by(|x, y| x.angle.total_cmp(&y.angle));
    let index: BTreeMap<(usize, u64), usize> = ends
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.strand, e.param.to_bits()), i))
        .collect();
    let boundary: Vec<Label> = (0..ends.len()).map(|i| Label::Str(format!("b{i}"))).collect();
    let hits: Vec<Vec<(f64, usize)>> = strand_hits
        .iter()
        .enumerate()
        .map(|(si, hs)| {
            hs.iter()
                .filter_map(|&h| index.get(&(si, h.to_bits())).map(|&i| (h, i)))
                .collect()
        })
        .collect();

    let mut connections = Vec::new();
    let mut pieces = Vec::new();
    let mut free_strands = Vec::new();
    for &(si, a, b) in &raw {
        let (ia, ib) = (index[&(si, a.to_bits())], index[&(si, b.to_bits())]);
        let mut on: Vec<&(f64, i64, usize, usize)> =
            occurrences[si].iter().filter(|o| in_interval(o.0, a, b)).collect();
        if a > b {
            // wrapped piece: parameters past the origin come last
            on.sort_by(|x, y| ((x.0 < a), x.0).partial_cmp(&((y.0 < a), y.0)).expect("finite"));
        }
        let mut prev = boundary[ia].clone();
        for &&(_, id, inc, out) in &on {
            connections.push((prev, port(id, inc)));
            prev = port(id, out);
        }
        connections.push((prev, boundary[ib].clone()));
        pieces.push(PieceRecord {
            strand: si,
            start: a,
            end: b,
            endpoints: Some([ia, ib]),
            crossings: on.iter().map(|o| o.1).collect(),
        });
    }
    for &si in &whole {
        let on = &occurrences[si];
        if on.is_empty() {
            free_strands.push(si);
            continue;
        }
        for (k, &(_, id, _, out)) in on.iter().enumerate() {
            let (_, next, inc, _) = on[(k + 1) % on.len()];
            connections.push((port(id, out), port(next, inc)));
        }
        pieces.push(PieceRecord {
            strand: si,
            start: 0.0,
            end: pa.strands[si].length(),
            endpoints: None,
            crossings: on.iter().map(|o| o.1).collect(),
        });
    }
    let key = |si: usize| pa.strands[si].points[0];
    free_strands.sort_by(|&x, &y| key(x).partial_cmp(&key(y)).expect("finite"));

    let diagram = TangleDiagram {
        boundary,
        crossings,
        connections,
        free_circles: free_strands.len(),
    };
    Ok(ClippedTangle {
        diagram,
        registry: ComponentRegistry {
            radius,
            endpoints: ends,
            pieces,
            free_circles: free_strands,
            hits,
        },
    })
}
