//! Fixtures and random generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;
use std::path::PathBuf;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tanglekh::diagram::builders::{add_kink, braid, disjoint_union, mirror};
use tanglekh::diagram::{apply_planar, PlanarPoint, PlanarTangleSpec, Tangle, TangleDiagram};
use tanglekh::ingest::{Axis, Curve, CurveSet};
use tanglekh::persistence::{ClosureMorphismSpec, DiagramRef, FiltrationFile, Step};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn diagram_path(name: &str) -> PathBuf {
    fixtures_dir().join("diagrams").join(format!("{name}.json"))
}

pub fn load_diagram(name: &str) -> TangleDiagram {
    TangleDiagram::from_path(diagram_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn curve_path(name: &str) -> PathBuf {
    fixtures_dir().join("curves").join(format!("{name}.json"))
}

pub fn load_curves(name: &str) -> CurveSet {
    CurveSet::load(curve_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn filtration_path(name: &str) -> PathBuf {
    fixtures_dir().join("filtrations").join(format!("{name}.json"))
}

fn closed(d: &TangleDiagram) -> TangleDiagram {
    apply_planar(&PlanarTangleSpec::closure(), d).unwrap().diagram
}

/// Every diagram fixture with the builder that defines it.
pub fn diagram_fixtures() -> Vec<(&'static str, TangleDiagram)> {
    let arc = braid(1, &[], 0);
    let neg = add_kink(&arc, 0, -1);
    let pos = add_kink(&arc, 0, 1);
    let mut knot12 = Vec::new();
    for _ in 0..5 {
        knot12.extend([1, -2]);
    }
    knot12.extend([1, 1]);
    vec![
        ("arc", arc.clone()),
        ("negative_kink_arc", neg.clone()),
        ("positive_kink_arc", pos.clone()),
        ("empty", TangleDiagram::default()),
        ("unknot", braid(1, &[], 1)),
        ("unknot_one_crossing", closed(&neg)),
        ("hopf", braid(2, &[1, 1], 2)),
        ("trefoil", braid(2, &[1, 1, 1], 2)),
        ("r1_link_before", braid(1, &[], 1)),
        ("r1_link_after", closed(&pos)),
        ("r2_tangle_before", braid(2, &[], 0)),
        ("r2_tangle_after", braid(2, &[1, -1], 0)),
        ("r2_link_before", braid(3, &[1, 1, 1], 3)),
        ("r2_link_after", braid(3, &[1, 1, 1, 2, -2], 3)),
        ("r3_tangle_before", braid(3, &[1, 2, 1], 0)),
        ("r3_tangle_after", braid(3, &[2, 1, 2], 0)),
        ("r3_link_before", braid(3, &[1, 2, 1, 1], 3)),
        ("r3_link_after", braid(3, &[2, 1, 2, 1], 3)),
        ("knot12", braid(3, &knot12, 3)),
    ]
}

/// Pairs of fixtures related by one Reidemeister move.
pub const REIDEMEISTER_PAIRS: [(&str, &str); 7] = [
    ("arc", "negative_kink_arc"),
    ("arc", "positive_kink_arc"),
    ("r1_link_before", "r1_link_after"),
    ("r2_tangle_before", "r2_tangle_after"),
    ("r2_link_before", "r2_link_after"),
    ("r3_tangle_before", "r3_tangle_after"),
    ("r3_link_before", "r3_link_after"),
];

fn polyline(points: Vec<[f64; 3]>, closed: bool) -> Curve {
    Curve { closed, points }
}

fn planar_set(curves: Vec<Curve>) -> CurveSet {
    CurveSet {
        axis: Axis::Z,
        center: [0.0, 0.0],
        curves,
    }
}

fn piecewise_linear(x: f64, knots: &[(f64, f64)]) -> f64 {
    for w in knots.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x <= x1 {
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    knots.last().expect("knots").1
}

/// Radii at which the flat trefoil's crossings sit.
pub const FLAT_TREFOIL_CROSSING_RADII: [f64; 3] = [2.0, 3.0, 4.0];

/// A flat trefoil drawn as the four-strand plat closure of three equal
/// twists, bent into polar coordinates around the center: the distance to
/// the center plays the role of height. Two cups at radii 1 and 1.25, the
/// twists at radii 2, 3 and 4 on the ray of angle zero, then caps at radii
/// 5 and 5.5.
pub fn flat_trefoil() -> CurveSet {
    // keypoints (angle in degrees, radius, weave side)
    let weave = |side: f64| -> Vec<(f64, f64)> {
        vec![(side * -20.0, 1.5), (side * 20.0, 2.5), (side * -20.0, 3.5), (side * 20.0, 4.5)]
    };
    let height = |rho: f64, side: f64| {
        side * piecewise_linear(rho, &[(1.5, 0.0), (2.0, -0.3), (3.0, 0.3), (4.0, -0.3), (4.5, 0.0)])
    };
    let mut legs: Vec<Vec<(f64, f64, f64)>> = Vec::new();
    let flat = |pts: &[(f64, f64)]| pts.iter().map(|&(t, r)| (t, r, 0.0)).collect::<Vec<_>>();
    legs.push(flat(&[(-40.0, 1.0), (-20.0, 1.5)]));
    legs.push(weave(1.0).iter().map(|&(t, r)| (t, r, 1.0)).collect());
    legs.push(flat(&[(20.0, 4.5), (20.0, 4.9), (40.0, 5.5), (60.0, 4.9), (60.0, 1.5), (40.0, 1.25), (20.0, 1.5)]));
    legs.push(weave(-1.0).iter().map(|&(t, r)| (t, r, -1.0)).collect());
    legs.push(flat(&[(-20.0, 4.5), (-20.0, 4.7), (-40.0, 5.0), (-60.0, 4.7), (-60.0, 1.5), (-40.0, 1.0)]));

    let mut keys: Vec<(f64, f64, f64)> = Vec::new();
    for leg in legs {
        for k in leg {
            // a shared keypoint takes the tag of the leg that follows it
            if keys.last().is_some_and(|l| (l.0, l.1) == (k.0, k.1)) {
                keys.pop();
            }
            keys.push(k);
        }
    }
    keys.pop(); // the closing keypoint repeats the first
    let n = keys.len();
    let mut points = Vec::new();
    for i in 0..n {
        let (a, b) = (keys[i], keys[(i + 1) % n]);
        // odd subdivision keeps the weave's crossing point off every vertex
        let pieces = if a.0 == b.0 { 1 } else { 2 * ((b.0 - a.0).abs() as usize / 2) + 1 };
        for j in 0..pieces {
            let s = j as f64 / pieces as f64;
            let theta = (a.0 + s * (b.0 - a.0)).to_radians();
            let rho = a.1 + s * (b.1 - a.1);
            let z = height(rho, a.2);
            points.push([rho * theta.cos(), rho * theta.sin(), z]);
        }
    }
    planar_set(vec![polyline(points, true)])
}

/// The threefold-symmetric trefoil `(sin t + 2 sin 2t, cos t - 2 cos 2t,
/// -sin 3t)`, whose projected distance to the center runs between 1 and 3.
pub fn symmetric_trefoil() -> CurveSet {
    let n = 300;
    let points = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            [
                t.sin() + 2.0 * (2.0 * t).sin(),
                t.cos() - 2.0 * (2.0 * t).cos(),
                -(3.0 * t).sin(),
            ]
        })
        .collect();
    planar_set(vec![polyline(points, true)])
}

pub fn circle_curve(center: [f64; 2], radius: f64, n: usize, z: f64) -> Curve {
    let points = (0..n)
        .map(|k| {
            let a = TAU * (k as f64 + 0.5) / n as f64;
            [center[0] + radius * a.cos(), center[1] + radius * a.sin(), z]
        })
        .collect();
    polyline(points, true)
}

/// Every curve fixture with its construction.
pub fn curve_fixtures() -> Vec<(&'static str, CurveSet)> {
    vec![
        (
            "far_loop",
            planar_set(vec![polyline(
                vec![[4.0, 0.0, 0.0], [5.0, 1.0, 0.0], [6.0, 0.0, 0.0], [5.0, -1.0, 0.0]],
                true,
            )]),
        ),
        (
            "chord",
            planar_set(vec![polyline(
                vec![[-5.0, 0.5, 0.0], [0.0, 0.6, 0.0], [5.0, 0.5, 0.0]],
                false,
            )]),
        ),
        (
            "coincident_depth",
            planar_set(vec![
                polyline(vec![[-1.0, 0.2, 0.0], [1.0, 0.3, 0.0]], false),
                polyline(vec![[0.1, -1.0, 0.0], [0.2, 1.0, 0.0]], false),
            ]),
        ),
        ("flat_trefoil", flat_trefoil()),
        ("symmetric_trefoil", symmetric_trefoil()),
    ]
}

fn inline(d: TangleDiagram) -> DiagramRef {
    DiagramRef::Inline(d)
}

fn closure_step(spec: ClosureMorphismSpec) -> Step {
    Step::Closure(spec)
}

/// Every filtration fixture with its construction.
pub fn filtration_fixtures() -> Vec<(&'static str, FiltrationFile)> {
    let unknot = braid(1, &[], 1);
    let arc = braid(1, &[], 0);
    let closure = apply_planar(&PlanarTangleSpec::closure(), &arc).unwrap();
    let add_circle = PlanarTangleSpec {
        circles: 1,
        ..PlanarTangleSpec::identity(0)
    };
    let plus_circle = apply_planar(&add_circle, &closure.diagram).unwrap();
    let circles = |k: usize| TangleDiagram {
        free_circles: k,
        ..TangleDiagram::default()
    };
    let bad: ClosureMorphismSpec = serde_json::from_str(
        r#"{"component_map":{"endpoints":[],"free_circles":[0]},"new":[]}"#,
    )
    .unwrap();
    vec![
        (
            "constant_unknot",
            FiltrationFile {
                grades: vec![0.0, 1.0, 2.0],
                diagrams: vec![inline(unknot.clone()), inline(unknot.clone()), inline(unknot.clone())],
                steps: vec![
                    closure_step(ClosureMorphismSpec::identity(0, 1)),
                    closure_step(ClosureMorphismSpec::identity(0, 1)),
                ],
            },
        ),
        (
            "arc_closure_circle",
            FiltrationFile {
                grades: vec![0.0, 1.0, 2.0],
                diagrams: vec![
                    DiagramRef::Path("../diagrams/arc.json".into()),
                    inline(closure.diagram.clone()),
                    inline(plus_circle.diagram.clone()),
                ],
                steps: vec![closure_step(closure.morphism), closure_step(plus_circle.morphism)],
            },
        ),
        (
            "cap_cup",
            FiltrationFile {
                grades: vec![0.0, 1.0, 2.0, 3.0],
                diagrams: vec![inline(circles(1)), inline(circles(2)), inline(circles(1)), inline(circles(1))],
                steps: vec![
                    Step::Cap,
                    Step::Cup { free_circle: 1 },
                    closure_step(ClosureMorphismSpec::identity(0, 1)),
                ],
            },
        ),
        (
            "circle_to_arc",
            FiltrationFile {
                grades: vec![0.0, 1.0],
                diagrams: vec![inline(unknot), inline(arc)],
                steps: vec![closure_step(bad)],
            },
        ),
    ]
}

/// A random planar diagram with at most `max_crossings` crossings, built
/// from braids, kinks, mirrors, unions and closures.
pub fn random_diagram(rng: &mut StdRng, max_crossings: usize) -> TangleDiagram {
    let strands = rng.gen_range(1..=4usize);
    let budget = rng.gen_range(0..=max_crossings);
    let braid_len = if strands > 1 { rng.gen_range(0..=budget) } else { 0 };
    let word: Vec<i32> = (0..braid_len)
        .map(|_| {
            let g = rng.gen_range(1..strands as i32);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    let closed = rng.gen_range(0..=strands);
    let mut d = braid(strands, &word, closed);
    for _ in braid_len..budget {
        if d.connections.is_empty() {
            break;
        }
        let i = rng.gen_range(0..d.connections.len());
        d = add_kink(&d, i, if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    if rng.gen_bool(0.25) {
        d = mirror(&d);
    }
    if rng.gen_bool(0.2) {
        d.free_circles += 1;
    }
    if rng.gen_bool(0.15) && d.crossings.len() < max_crossings {
        d = disjoint_union(&d, &braid(1, &[], rng.gen_range(0..=1)));
    }
    d
}

/// A random diagram without boundary.
pub fn random_link(rng: &mut StdRng, max_crossings: usize) -> TangleDiagram {
    loop {
        let d = random_diagram(rng, max_crossings);
        if d.boundary.is_empty() {
            return d;
        }
    }
}

pub fn arb_diagram(max_crossings: usize) -> impl Strategy<Value = TangleDiagram> {
    any::<u64>().prop_map(move |seed| random_diagram(&mut StdRng::seed_from_u64(seed), max_crossings))
}

/// Elementary planar operators on a hole with `n` points.
pub fn elementary_operator(rng: &mut StdRng, n: usize) -> PlanarTangleSpec {
    let through = |outer: usize, shift: usize, skip: &[usize]| {
        let kept: Vec<usize> = (0..n).filter(|i| !skip.contains(i)).collect();
        kept.iter()
            .enumerate()
            .map(|(k, &i)| (PlanarPoint::Inner(i), PlanarPoint::Outer((k + shift) % outer.max(1))))
            .collect::<Vec<_>>()
    };
    let choice = rng.gen_range(0..4);
    match choice {
        // join two cyclically adjacent hole points
        0 if n >= 2 => {
            let i = rng.gen_range(0..n);
            let j = (i + 1) % n;
            // keep cyclic order: start after the joined pair
            let kept: Vec<usize> = (0..n).map(|k| (j + 1 + k) % n).filter(|&k| k != i && k != j).collect();
            let mut arcs: Vec<_> = kept
                .iter()
                .enumerate()
                .map(|(k, &p)| (PlanarPoint::Inner(p), PlanarPoint::Outer(k)))
                .collect();
            arcs.push((PlanarPoint::Inner(i), PlanarPoint::Inner(j)));
            PlanarTangleSpec {
                outer: n - 2,
                inner: n,
                arcs,
                circles: 0,
                crossings: Vec::new(),
            }
        }
        // insert a new arc between two adjacent outer points
        1 => {
            let at = rng.gen_range(0..=n);
            let mut arcs: Vec<_> = (0..n)
                .map(|i| {
                    let o = if i < at { i } else { i + 2 };
                    (PlanarPoint::Inner(i), PlanarPoint::Outer(o))
                })
                .collect();
            arcs.push((PlanarPoint::Outer(at), PlanarPoint::Outer(at + 1)));
            PlanarTangleSpec {
                outer: n + 2,
                inner: n,
                arcs,
                circles: 0,
                crossings: Vec::new(),
            }
        }
        // rotate the boundary
        2 if n > 0 => PlanarTangleSpec {
            outer: n,
            inner: n,
            arcs: through(n, rng.gen_range(0..n), &[]),
            circles: 0,
            crossings: Vec::new(),
        },
        // add a disjoint circle
        _ => PlanarTangleSpec {
            circles: 1,
            ..PlanarTangleSpec::identity(n)
        },
    }
}

/// A composite of one to three elementary operators on a hole of size `n`.
pub fn random_operator(rng: &mut StdRng, n: usize) -> PlanarTangleSpec {
    let mut op = elementary_operator(rng, n);
    for _ in 0..rng.gen_range(0..3) {
        let next = elementary_operator(rng, op.outer);
        op = op.then(&next).expect("sizes match");
    }
    op
}

/// A chain of `steps` planar closures starting from a random diagram, or
/// `None` when some step merges components and so has no closure map.
pub fn random_closure_chain(
    rng: &mut StdRng,
    max_crossings: usize,
    steps: usize,
) -> Option<(Vec<TangleDiagram>, Vec<ClosureMorphismSpec>)> {
    let mut diagrams = vec![random_diagram(rng, max_crossings)];
    let mut specs = Vec::new();
    for _ in 0..steps {
        let d = diagrams.last().expect("non-empty");
        let op = random_operator(rng, d.boundary.len());
        let out = apply_planar(&op, d).ok()?;
        let (src, dst) = (Tangle::new(d.clone()).ok()?, Tangle::new(out.diagram.clone()).ok()?);
        out.morphism.validate(&src, &dst).ok()?;
        diagrams.push(out.diagram);
        specs.push(out.morphism);
    }
    Some((diagrams, specs))
}

/// `count` valid closure chains drawn from consecutive seeds.
pub fn closure_chains(
    seed: u64,
    count: usize,
    max_crossings: usize,
    steps: usize,
) -> Vec<(Vec<TangleDiagram>, Vec<ClosureMorphismSpec>)> {
    (seed..)
        .filter_map(|s| random_closure_chain(&mut StdRng::seed_from_u64(s), max_crossings, steps))
        .take(count)
        .collect()
}
pub mod checks;
