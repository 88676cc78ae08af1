mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use common::*;
use tanglekh::diagram::builders::braid;
use tanglekh::ingest::{
    ingest, project_and_detect, BoundaryCause, Degeneracy, IngestError, DEFAULT_TOL,
};
use tanglekh::persistence::Step;
use tanglekh::{BigradedHomology, ChainComplex, Functor, PrimeField, Rationals, TangleDiagram};

fn homology_ranks(d: &TangleDiagram) -> Vec<tanglekh::homology::RankEntry> {
    let c = ChainComplex::build(d, Functor::Tangle, Rationals).unwrap();
    BigradedHomology::compute(&c).unwrap().ranks()
}

#[test]
fn flat_trefoil_matches_braid_closure() {
    let out = ingest(&load_curves("flat_trefoil"), DEFAULT_TOL, None).unwrap();
    let last = out.filtration.diagrams.last().unwrap();
    assert_eq!(last.crossings.len(), 3);
    assert!(last.boundary.is_empty());
    assert_eq!(homology_ranks(last), homology_ranks(&braid(2, &[1, 1, 1], 2)));
}

#[test]
fn flat_trefoil_boundaries_sit_at_crossing_radii() {
    let out = ingest(&load_curves("flat_trefoil"), DEFAULT_TOL, None).unwrap();
    let births: Vec<&_> = out
        .sidecar
        .boundaries
        .iter()
        .filter(|b| matches!(b.cause, BoundaryCause::CrossingBirth { .. }))
        .collect();
    assert_eq!(births.len(), 3, "{:?}", out.sidecar.boundaries);
    for (b, r) in births.iter().zip(FLAT_TREFOIL_CROSSING_RADII) {
        assert!(b.from_radius < r && r < b.to_radius, "{b:?}");
    }
    let boundary_steps = out
        .filtration
        .steps
        .iter()
        .filter(|s| matches!(s, Step::Boundary { .. }))
        .count();
    assert_eq!(boundary_steps, out.sidecar.boundaries.len());
}

/// The lower cap joins two distinct arcs, which no closure morphism
/// carries, so it ends a run on its own.
#[test]
fn flat_trefoil_lower_cap_is_a_merge_boundary() {
    let out = ingest(&load_curves("flat_trefoil"), DEFAULT_TOL, None).unwrap();
    let merges: Vec<_> = out
        .sidecar
        .boundaries
        .iter()
        .filter(|b| matches!(b.cause, BoundaryCause::Merge { .. }))
        .collect();
    assert_eq!(merges.len(), 1, "{:?}", out.sidecar.boundaries);
    assert!(merges[0].from_radius < 5.0 && 5.0 < merges[0].to_radius);
}

#[test]
fn flat_trefoil_persistence_computes() {
    let out = ingest(&load_curves("flat_trefoil"), DEFAULT_TOL, None).unwrap();
    let m = out.filtration.compute(Functor::Tangle, PrimeField::new(2).unwrap()).unwrap();
    assert_eq!(m.homology.len(), out.filtration.len());
    assert_eq!(out.filtration.runs().len(), out.sidecar.boundaries.len() + 1);
}

#[test]
fn symmetric_trefoil_ingests() {
    let out = ingest(&load_curves("symmetric_trefoil"), DEFAULT_TOL, None).unwrap();
    let last = out.filtration.diagrams.last().unwrap();
    assert_eq!(last.crossings.len(), 3);
    let mirror = homology_ranks(&braid(2, &[-1, -1, -1], 2));
    let plain = homology_ranks(&braid(2, &[1, 1, 1], 2));
    let got = homology_ranks(last);
    assert!(got == mirror || got == plain);
}

#[test]
fn coincident_depth_is_rejected() {
    let err = project_and_detect(&load_curves("coincident_depth"), DEFAULT_TOL).unwrap_err();
    assert!(matches!(
        err,
        IngestError::NonGeneric {
            kind: Degeneracy::CoincidentDepth,
            ..
        }
    ));
    assert!(err.is_genericity());
}

#[test]
fn chord_stops_before_its_ends() {
    let out = ingest(&load_curves("chord"), DEFAULT_TOL, None).unwrap();
    let cut = out.sidecar.truncated_at.expect("truncated");
    assert!(out.filtration.grades.iter().all(|&g| g < cut));
    assert_eq!(out.filtration.diagrams.last().unwrap().boundary.len(), 2);
}

#[test]
fn far_loop_is_born_then_enclosed() {
    let out = ingest(&load_curves("far_loop"), DEFAULT_TOL, None).unwrap();
    let ds = &out.filtration.diagrams;
    assert_eq!(ds.first().unwrap(), &TangleDiagram::default());
    assert_eq!(ds.last().unwrap().free_circles, 1);
    assert!(out.sidecar.boundaries.is_empty());
    assert_eq!(out.filtration.len(), 3);
}

#[test]
fn ingest_is_deterministic() {
    let set = load_curves("flat_trefoil");
    let a = ingest(&set, DEFAULT_TOL, None).unwrap();
    let b = ingest(&set, DEFAULT_TOL, None).unwrap();
    assert_eq!(a.filtration, b.filtration);
    assert_eq!(a.sidecar, b.sidecar);
}

/// Reordering the input curves renumbers nothing observable: crossing ids
/// come from geometry, so every clipped diagram is unchanged.
#[test]
fn curve_order_does_not_matter() {
    let mut set = load_curves("far_loop");
    set.curves.push(circle_curve([0.0, 0.0], 2.0, 64, 1.0));
    set.curves.push(circle_curve([0.5, 0.0], 3.0, 64, -1.0));
    let base = ingest(&set, DEFAULT_TOL, None).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..4 {
        let mut shuffled = set.clone();
        shuffled.curves.shuffle(&mut rng);
        let out = ingest(&shuffled, DEFAULT_TOL, None).unwrap();
        assert_eq!(out.filtration.grades, base.filtration.grades);
        for (x, y) in out.filtration.diagrams.iter().zip(&base.filtration.diagrams) {
            assert_eq!(x.crossings, y.crossings);
            assert_eq!(x.free_circles, y.free_circles);
            assert_eq!(x.boundary.len(), y.boundary.len());
        }
    }
}

/// A disk past every event holds the whole projected diagram.
#[test]
fn enclosing_disk_holds_every_crossing() {
    for name in ["flat_trefoil", "symmetric_trefoil"] {
        let set = load_curves(name);
        let pa = project_and_detect(&set, DEFAULT_TOL).unwrap();
        let out = ingest(&set, DEFAULT_TOL, None).unwrap();
        let last = out.filtration.diagrams.last().unwrap();
        let mut ids: Vec<i64> = last.crossings.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        let want: Vec<i64> = pa.crossings.iter().map(|c| c.id).collect();
        assert_eq!(ids, want, "{name}");
        for c in &last.crossings {
            let rec = pa.crossings.iter().find(|r| r.id == c.id).unwrap();
            assert_eq!(c.sign, rec.sign);
        }
    }
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn segment_point(p: &[[f64; 3]], closed: bool, t: f64) -> ([f64; 3], [f64; 3]) {
    let n = p.len();
    let k = (t.floor() as usize).min(if closed { n - 1 } else { n - 2 });
    let (a, b) = (p[k], p[(k + 1) % n]);
    let s = t - k as f64;
    let pt = std::array::from_fn(|i| a[i] + s * (b[i] - a[i]));
    let dir = std::array::from_fn(|i| b[i] - a[i]);
    (pt, dir)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Crossing signs agree with the 3-D right-hand rule: the over tangent,
    /// the under tangent and the vertical offset form a positive frame.
    #[test]
    fn crossing_signs_follow_the_right_hand_rule(
        a in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
        b in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
        za in -1.0f64..1.0,
        zb in -1.0f64..1.0,
    ) {
        prop_assume!((za - zb).abs() > 1e-3);
        let ca = tanglekh::ingest::Curve { closed: false, points: vec![[a.0, a.1, za], [a.2, a.3, za]] };
        let cb = tanglekh::ingest::Curve { closed: false, points: vec![[b.0, b.1, zb], [b.2, b.3, zb]] };
        let set = tanglekh::ingest::CurveSet {
            axis: tanglekh::ingest::Axis::Z,
            center: [0.0, 0.0],
            curves: vec![ca.clone(), cb.clone()],
        };
        let Ok(pa) = project_and_detect(&set, 1e-6) else { return Ok(()) };
        for c in &pa.crossings {
            let curves = [&ca, &cb];
            let over = curves[pa.strands[c.over.strand].curve];
            let under = curves[pa.strands[c.under.strand].curve];
            let (po, to) = segment_point(&over.points, false, c.over.param);
            let (pu, tu) = segment_point(&under.points, false, c.under.param);
            let n = cross3(to, tu);
            let off: [f64; 3] = std::array::from_fn(|i| po[i] - pu[i]);
            let orient = n[0] * off[0] + n[1] * off[1] + n[2] * off[2];
            prop_assert_eq!(c.sign as f64, orient.signum());
        }
    }
}
