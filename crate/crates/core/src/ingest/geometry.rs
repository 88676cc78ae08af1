//! Projection and crossing detection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CurveSet, Degeneracy, IngestError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    #[default]
    Z,
}

impl Axis {
    /// Plane coordinates and depth, with the plane basis oriented so that
    /// looking down the axis from its positive end shows it counterclockwise.
    pub fn split(self, p: [f64; 3]) -> ([f64; 2], f64) {
        match self {
            Axis::X => ([p[1], p[2]], p[0]),
            Axis::Y => ([p[2], p[0]], p[1]),
            Axis::Z => ([p[0], p[1]], p[2]),
        }
    }
}

pub(crate) fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm(a: [f64; 2]) -> f64 {
    dot(a, a).sqrt()
}

/// A projected curve. Parameter `k + t` is the point `t` of the way along
/// segment `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strand {
    pub curve: usize,
    pub closed: bool,
    pub points: Vec<[f64; 2]>,
    pub depth: Vec<f64>,
}

impl Strand {
    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len() - 1
        }
    }

    /// Total parameter length.
    pub fn length(&self) -> f64 {
        self.segment_count() as f64
    }

    pub fn segment(&self, k: usize) -> ([f64; 2], [f64; 2]) {
        (self.points[k], self.points[(k + 1) % self.points.len()])
    }

    fn split_param(&self, param: f64) -> (usize, f64) {
        let k = (param.floor() as usize).min(self.segment_count() - 1);
        (k, param - k as f64)
    }

    pub fn point_at(&self, param: f64) -> [f64; 2] {
        let (k, t) = self.split_param(param);
        let (a, b) = self.segment(k);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    pub fn depth_at(&self, param: f64) -> f64 {
        let (k, t) = self.split_param(param);
        let n = self.points.len();
        self.depth[k] + t * (self.depth[(k + 1) % n] - self.depth[k])
    }

    pub fn tangent_at(&self, param: f64) -> [f64; 2] {
        let (a, b) = self.segment(self.split_param(param).0);
        sub(b, a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrandPoint {
    pub strand: usize,
    pub param: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    /// Diagram crossing id; ids ascend with distance from the center.
    pub id: i64,
    pub position: [f64; 2],
    pub over: StrandPoint,
    pub under: StrandPoint,
    pub sign: i8,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub segment_pairs: usize,
    /// Smallest `|sin|` of a crossing angle.
    pub min_crossing_sine: Option<f64>,
    pub min_depth_gap: Option<f64>,
    pub min_crossing_separation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarArrangement {
    pub center: [f64; 2],
    /// Largest distance from the center to a projected point.
    pub scale: f64,
    pub tol: f64,
    pub strands: Vec<Strand>,
    pub crossings: Vec<CrossingRecord>,
    pub report: GenericityReport,
}

impl PlanarArrangement {
    /// Absolute length below which two values count as equal.
    pub fn eps(&self) -> f64 {
        self.tol * self.scale.max(f64::MIN_POSITIVE)
    }

    pub fn distance(&self, p: [f64; 2]) -> f64 {
        norm(sub(p, self.center))
    }

    pub fn angle(&self, p: [f64; 2]) -> f64 {
        let d = sub(p, self.center);
        d[1].atan2(d[0]).rem_euclid(std::f64::consts::TAU)
    }
}

struct Hit {
    position: [f64; 2],
    a: StrandPoint,
    b: StrandPoint,
    sine: f64,
}

fn adjacent(s: &Strand, i: usize, j: usize) -> bool {
    let n = s.segment_count();
    i.abs_diff(j) == 1 || (s.closed && n > 2 && i.abs_diff(j) == n - 1)
}

/// Intersection of two segments, or a degeneracy.
fn intersect(
    (p, p2): ([f64; 2], [f64; 2]),
    (q, q2): ([f64; 2], [f64; 2]),
    eps: f64,
    sine_tol: f64,
) -> Result<Option<(f64, f64, f64)>, Degeneracy> {
    let (d, e) = (sub(p2, p), sub(q2, q));
    let (ld, le) = (norm(d), norm(e));
    let denom = cross(d, e);
    let w = sub(q, p);
    if denom.abs() <= sine_tol * ld * le {
        // parallel: only a collinear overlap matters
        if (cross(d, w) / ld).abs() > eps {
            return Ok(None);
        }
        let (s0, s1) = (dot(w, d) / ld, dot(sub(q2, p), d) / ld);
        let (lo, hi) = (s0.min(s1), s0.max(s1));
        return if hi < -eps || lo > ld + eps {
            Ok(None)
        } else {
            Err(Degeneracy::Overlap)
        };
    }
    let t = cross(w, e) / denom;
    let u = cross(w, d) / denom;
    if (0.0..1.0).contains(&t) && (0.0..1.0).contains(&u) {
        // through a vertex, transversality cannot be read off one segment pair
        let near_vertex = |f: f64, len: f64| f * len <= eps || (1.0 - f) * len <= eps;
        if near_vertex(t, ld) || near_vertex(u, le) {
            return Err(Degeneracy::Tangential);
        }
        Ok(Some((t, u, denom / (ld * le))))
    } else {
        Ok(None)
    }
}

fn bbox_overlap(a: ([f64; 2], [f64; 2]), b: ([f64; 2], [f64; 2]), eps: f64) -> bool {
    (0..2).all(|k| {
        let (alo, ahi) = (a.0[k].min(a.1[k]), a.0[k].max(a.1[k]));
        let (blo, bhi) = (b.0[k].min(b.1[k]), b.0[k].max(b.1[k]));
        alo <= bhi + eps && blo <= ahi + eps
    })
}

/// Project every curve and find all crossings. `tol` is relative to the
/// radius of the projected data around the center.
pub fn project_and_detect(c: &CurveSet, tol: f64) -> Result<PlanarArrangement, IngestError> {
    c.check()?;
    let strands: Vec<Strand> = c
        .curves
        .iter()
        .enumerate()
        .map(|(i, curve)| {
            let (points, depth) = curve.points.iter().map(|&p| c.axis.split(p)).unzip();
            Strand {
                curve: i,
                closed: curve.closed,
                points,
                depth,
            }
        })
        .collect();
    let scale = strands
        .iter()
        .flat_map(|s| &s.points)
        .map(|&p| norm(sub(p, c.center)))
        .fold(0.0, f64::max);
    let mut pa = PlanarArrangement {
        center: c.center,
        scale,
        tol,
        strands,
        crossings: Vec::new(),
        report: GenericityReport::default(),
    };
    let eps = pa.eps();

    let segments: Vec<(usize, usize)> = pa
        .strands
        .iter()
        .enumerate()
        .flat_map(|(s, strand)| (0..strand.segment_count()).map(move |k| (s, k)))
        .collect();
    let found: Vec<Result<Vec<Hit>, IngestError>> = (0..segments.len())
        .into_par_iter()
        .map(|i| {
            let (sa, ka) = segments[i];
            let a = pa.strands[sa].segment(ka);
            let mut hits = Vec::new();
            for &(sb, kb) in &segments[i + 1..] {
                if sa == sb && (ka == kb || adjacent(&pa.strands[sa], ka, kb)) {
                    continue;
                }
                let b = pa.strands[sb].segment(kb);
                if !bbox_overlap(a, b, eps) {
                    continue;
                }
                match intersect(a, b, eps, tol) {
                    Ok(Some((t, u, sine))) => hits.push(Hit {
                        position: pa.strands[sa].point_at(ka as f64 + t),
                        a: StrandPoint { strand: sa, param: ka as f64 + t },
                        b: StrandPoint { strand: sb, param: kb as f64 + u },
                        sine,
                    }),
                    Ok(None) => {}
                    Err(kind) => {
                        return Err(IngestError::NonGeneric {
                            kind,
                            position: b.0,
                        })
                    }
                }
            }
            Ok(hits)
        })
        .collect();
    let n = segments.len();
    pa.report.segment_pairs = n * n.saturating_sub(1) / 2;
    let mut hits = Vec::new();
    for h in found {
        hits.extend(h?);
    }

    let mut crossings = Vec::with_capacity(hits.len());
    for h in &hits {
        let (da, db) = (
            pa.strands[h.a.strand].depth_at(h.a.param),
            pa.strands[h.b.strand].depth_at(h.b.param),
        );
        let gap = (da - db).abs();
        if gap <= eps {
            return Err(IngestError::NonGeneric {
                kind: Degeneracy::CoincidentDepth,
                position: h.position,
            });
        }
        let sine = h.sine.abs();
        let (over, under) = if da > db { (h.a, h.b) } else { (h.b, h.a) };
        let o = pa.strands[over.strand].tangent_at(over.param);
        let u = pa.strands[under.strand].tangent_at(under.param);
        let r = &mut pa.report;
        r.min_crossing_sine = Some(r.min_crossing_sine.map_or(sine, |m| m.min(sine)));
        r.min_depth_gap = Some(r.min_depth_gap.map_or(gap, |m| m.min(gap)));
        crossings.push(CrossingRecord {
            id: 0,
            position: h.position,
            over,
            under,
            sign: if cross(o, u) > 0.0 { 1 } else { -1 },
        });
    }
    for (i, a) in crossings.iter().enumerate() {
        for b in &crossings[i + 1..] {
            let sep = norm(sub(a.position, b.position));
            let r = &mut pa.report;
            r.min_crossing_separation = Some(r.min_crossing_separation.map_or(sep, |m| m.min(sep)));
            if sep <= eps {
                return Err(IngestError::NonGeneric {
                    kind: Degeneracy::TriplePoint,
                    position: a.position,
                });
            }
        }
    }
    crossings.sort_by(|a, b| {
        let key = |c: &CrossingRecord| (pa.distance(c.position), pa.angle(c.position));
        key(a).partial_cmp(&key(b)).expect("finite coordinates")
    });
    for (i, c) in crossings.iter_mut().enumerate() {
        c.id = i as i64 + 1;
    }
    pa.crossings = crossings;
    Ok(pa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Curve;

    fn open(points: &[[f64; 3]]) -> Curve {
        Curve {
            closed: false,
            points: points.to_vec(),
        }
    }

    fn set(curves: Vec<Curve>) -> CurveSet {
        CurveSet {
            axis: Axis::Z,
            center: [0.0, 0.0],
            curves,
        }
    }

    /// Right-hand rule in space: sign of `(t_over × t_under) · (p_over - p_under)`.
    fn triple_product_sign(over: [[f64; 3]; 2], under: [[f64; 3]; 2], gap: [f64; 3]) -> i8 {
        let d = |s: [[f64; 3]; 2]| [s[1][0] - s[0][0], s[1][1] - s[0][1], s[1][2] - s[0][2]];
        let (a, b) = (d(over), d(under));
        let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let v = c[0] * gap[0] + c[1] * gap[1] + c[2] * gap[2];
        if v > 0.0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn orthogonal_pair_crosses_once() {
        let under = [[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
        let over = [[0.0, -1.0, 1.0], [0.0, 1.0, 1.0]];
        let pa = project_and_detect(&set(vec![open(&under), open(&over)]), 1e-9).unwrap();
        assert_eq!(pa.crossings.len(), 1);
        let c = &pa.crossings[0];
        assert!(norm(c.position) < 1e-12);
        assert_eq!((c.over.strand, c.under.strand), (1, 0));
        // north over east is left-handed
        let oracle = triple_product_sign(over, under, [0.0, 0.0, 1.0]);
        assert_eq!(oracle, -1);
        assert_eq!(c.sign, oracle);
    }

    #[test]
    fn right_handed_twist_is_positive() {
        // two strands of a right-handed double helix about the x axis, seen along z
        let helix = |phase: f64| {
            let pts: Vec<[f64; 3]> = (0..=40)
                .map(|k| {
                    let t = -1.0 + 3.0 * k as f64 / 40.0 + 0.013;
                    let a = t + phase;
                    [t, a.cos(), a.sin()]
                })
                .collect();
            open(&pts)
        };
        let pa = project_and_detect(&set(vec![helix(0.0), helix(std::f64::consts::PI)]), 1e-9).unwrap();
        assert!(!pa.crossings.is_empty());
        assert!(pa.crossings.iter().all(|c| c.sign == 1));
    }

    #[test]
    fn parallel_segments_do_not_cross() {
        let pa = project_and_detect(
            &set(vec![
                open(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
                open(&[[0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]),
            ]),
            1e-9,
        )
        .unwrap();
        assert!(pa.crossings.is_empty());
    }

    #[test]
    fn degeneracies_are_reported() {
        let flat = set(vec![
            open(&[[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
            open(&[[0.0, -1.0, 0.0], [0.0, 1.0, 0.0]]),
        ]);
        assert!(matches!(
            project_and_detect(&flat, 1e-9),
            Err(IngestError::NonGeneric { kind: Degeneracy::CoincidentDepth, .. })
        ));
        let triple = set(vec![
            open(&[[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
            open(&[[0.0, -1.0, 1.0], [0.0, 1.0, 1.0]]),
            open(&[[-1.0, -1.0, 2.0], [1.0, 1.0, 2.0]]),
        ]);
        assert!(matches!(
            project_and_detect(&triple, 1e-9),
            Err(IngestError::NonGeneric { kind: Degeneracy::TriplePoint, .. })
        ));
        let overlap = set(vec![
            open(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]),
            open(&[[1.0, 0.0, 1.0], [3.0, 0.0, 1.0]]),
        ]);
        assert!(matches!(
            project_and_detect(&overlap, 1e-9),
            Err(IngestError::NonGeneric { kind: Degeneracy::Overlap, .. })
        ));
        let touching = set(vec![
            open(&[[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
            open(&[[0.0, 1.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 1.0]]),
        ]);
        assert!(matches!(
            project_and_detect(&touching, 1e-9),
            Err(IngestError::NonGeneric { kind: Degeneracy::Tangential, .. })
        ));
    }

    #[test]
    fn axis_planes_are_oriented() {
        // the same picture rotated so that the old z axis becomes x
        let rot = |p: [f64; 3]| [p[2], p[0], p[1]];
        let under = [[-1.0, 0.3, 0.0], [1.0, -0.2, 0.0]];
        let over = [[0.1, -1.0, 1.0], [-0.2, 1.0, 1.0]];
        let z = project_and_detect(&set(vec![open(&under), open(&over)]), 1e-9).unwrap();
        let mut s = set(vec![open(&under.map(rot)), open(&over.map(rot))]);
        s.axis = Axis::X;
        let x = project_and_detect(&s, 1e-9).unwrap();
        assert_eq!(z.crossings[0].sign, x.crossings[0].sign);
        let rot_y = |p: [f64; 3]| [p[1], p[2], p[0]];
        let mut s = set(vec![open(&under.map(rot_y)), open(&over.map(rot_y))]);
        s.axis = Axis::Y;
        let y = project_and_detect(&s, 1e-9).unwrap();
        assert_eq!(z.crossings[0].sign, y.crossings[0].sign);
    }
}
