//! Radii at which the clipped tangle can change.

use serde::{Deserialize, Serialize};

use super::geometry::{dot, sub, PlanarArrangement, Strand};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventCause {
    CrossingEnters { crossing: i64 },
    /// A strand touches the circle, changing the boundary endpoint count.
    Tangency { strand: usize, param: f64 },
    /// Closest point of a strand.
    ComponentEnters { strand: usize, param: f64 },
    /// Farthest point of a closed strand.
    ComponentEnclosed { strand: usize, param: f64 },
    /// An end of an open strand.
    OpenEnd { strand: usize, param: f64 },
}

/// One or more causes sharing a radius up to tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationEvent {
    pub radius: f64,
    /// Largest radius among the merged causes.
    pub upper: f64,
    pub causes: Vec<EventCause>,
}

impl FiltrationEvent {
    pub fn contains(&self, r: f64, eps: f64) -> bool {
        r >= self.radius - eps && r <= self.upper + eps
    }
}

/// Critical points of the distance to `center` along a strand, as
/// `(param, distance, is_max)`. Distance is convex on each segment, so
/// vertices and interior segment minima are the only candidates.
fn distance_extrema(s: &Strand, center: [f64; 2]) -> Vec<(f64, f64, bool)> {
    let dist = |p: [f64; 2]| {
        let d = sub(p, center);
        dot(d, d).sqrt()
    };
    let mut cand: Vec<(f64, f64)> = Vec::new();
    for k in 0..s.segment_count() {
        let (a, b) = s.segment(k);
        cand.push((k as f64, dist(a)));
        let d = sub(b, a);
        let t = -dot(sub(a, center), d) / dot(d, d);
        if t > 0.0 && t < 1.0 {
            cand.push((k as f64 + t, dist(s.point_at(k as f64 + t))));
        }
    }
    if !s.closed {
        cand.push((s.length(), dist(*s.points.last().expect("two points"))));
    }
    let n = cand.len();
    let mut out = Vec::new();
    for i in 0..n {
        let v = cand[i].1;
        let neighbours: Vec<f64> = if s.closed {
            vec![cand[(i + n - 1) % n].1, cand[(i + 1) % n].1]
        } else {
            [i.checked_sub(1), (i + 1 < n).then_some(i + 1)]
                .into_iter()
                .flatten()
                .map(|j| cand[j].1)
                .collect()
        };
        if neighbours.iter().all(|&w| v < w) {
            out.push((cand[i].0, v, false));
        } else if neighbours.iter().all(|&w| v > w) {
            out.push((cand[i].0, v, true));
        }
    }
    out
}

/// All critical radii, merged where they agree within tolerance.
pub fn critical_radii(pa: &PlanarArrangement, center: [f64; 2]) -> Vec<FiltrationEvent> {
    let mut raw: Vec<(f64, EventCause)> = pa
        .crossings
        .iter()
        .map(|c| {
            let d = sub(c.position, center);
            (dot(d, d).sqrt(), EventCause::CrossingEnters { crossing: c.id })
        })
        .collect();
    for (i, s) in pa.strands.iter().enumerate() {
        let ext = distance_extrema(s, center);
        let lo = ext.iter().filter(|e| !e.2).map(|e| e.1).fold(f64::INFINITY, f64::min);
        let hi = ext.iter().filter(|e| e.2).map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
        for (param, r, is_max) in ext {
            let cause = if !s.closed && (param == 0.0 || param == s.length()) {
                EventCause::OpenEnd { strand: i, param }
            } else if !is_max && r == lo {
                EventCause::ComponentEnters { strand: i, param }
            } else if is_max && r == hi && s.closed {
                EventCause::ComponentEnclosed { strand: i, param }
            } else {
                EventCause::Tangency { strand: i, param }
            };
            raw.push((r, cause));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eps = pa.eps();
    let mut events: Vec<FiltrationEvent> = Vec::new();
    for (r, cause) in raw {
        match events.last_mut() {
            Some(e) if r - e.upper <= eps => {
                e.upper = r;
                e.causes.push(cause);
            }
            _ => events.push(FiltrationEvent {
                radius: r,
                upper: r,
                causes: vec![cause],
            }),
        }
    }
    events
}

/// One grade below the first event, one between each consecutive pair and
/// one past the last.
pub fn sample_grades(events: &[FiltrationEvent]) -> Vec<f64> {
    let Some(last) = events.last() else {
        return vec![1.0];
    };
    let mut grades = vec![events[0].radius / 2.0];
    grades.extend(events.windows(2).map(|w| (w[0].upper + w[1].radius) / 2.0));
    let step = if events.len() > 1 {
        last.radius - events[events.len() - 2].upper
    } else {
        last.upper
    };
    grades.push(last.upper + step.max(last.upper * 1e-3) / 2.0);
    grades
}
