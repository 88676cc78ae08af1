//! Assertion helpers shared by the integration suites and the acceptance
//! harness. Each panics on the first violation.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;
use tanglekh::algebra::Symbol;
use tanglekh::diagram::{apply_planar, Label, PlanarPoint, PlanarTangleSpec};
use tanglekh::persistence::{
    build_psi, cap_map, cone_projection, cup_map, induced_on_homology, saddle_map,
    verify_chain_map, PersistenceModule, RankTable, SaddleSite,
};
use tanglekh::{BigradedHomology, ChainComplex, Field, Functor, Rationals, TangleDiagram};

fn complex(d: &TangleDiagram) -> ChainComplex<Rationals> {
    ChainComplex::build(d, Functor::Tangle, Rationals).unwrap()
}

/// Labels of a generator listed in picture order.
fn in_picture_order(labels: &[Symbol], order: &[usize]) -> String {
    order.iter().map(|&k| labels[k].to_string()).collect::<Vec<_>>().join("⊗")
}

/// An arc, a circle and an arc, side by side; the outer arcs are closed off
/// one after the other. Rows of the chase for the middle circle at `v+` and
/// at `v-`, each generator written in picture order.
pub fn element_chase() -> [Vec<String>; 2] {
    let s = |x: &str| Label::Str(x.into());
    let start = TangleDiagram {
        boundary: vec![s("a"), s("b"), s("c"), s("d")],
        crossings: Vec::new(),
        connections: vec![(s("a"), s("b")), (s("c"), s("d"))],
        free_circles: 1,
    };
    let close_first = PlanarTangleSpec {
        outer: 2,
        inner: 4,
        arcs: vec![
            (PlanarPoint::Inner(0), PlanarPoint::Inner(1)),
            (PlanarPoint::Inner(2), PlanarPoint::Outer(0)),
            (PlanarPoint::Inner(3), PlanarPoint::Outer(1)),
        ],
        circles: 0,
        crossings: Vec::new(),
    };
    let mid = apply_planar(&close_first, &start).unwrap();
    let end = apply_planar(&PlanarTangleSpec::closure(), &mid.diagram).unwrap();
    let cs = [complex(&start), complex(&mid.diagram), complex(&end.diagram)];
    let specs = [&mid.morphism, &end.morphism];

    // components of the only state: arc ab, arc cd, circle
    let mut order = vec![0, 2, 1];
    let mut orders = vec![order.clone()];
    for (k, spec) in specs.iter().enumerate() {
        let (ts, tt) = (cs[k].tangle(), cs[k + 1].tangle());
        let image = spec
            .component_images(ts, tt, cs[k].resolution(0), cs[k + 1].resolution(0))
            .unwrap();
        order = order.iter().map(|&c| image[c]).collect();
        orders.push(order.clone());
    }

    let chase = |first: &[Symbol]| -> Vec<String> {
        let mut lab = cs[0].labeling_of(0, first);
        let mut row = vec![in_picture_order(first, &orders[0])];
        for (k, spec) in specs.iter().enumerate() {
            let psi = build_psi(&cs[k], &cs[k + 1], spec).unwrap();
            let col = &psi.at(0).unwrap().cols[cs[k].index_of(0, lab)];
            assert_eq!(col.len(), 1);
            let (_, next) = cs[k + 1].locate(0, col[0].0);
            lab = next;
            row.push(in_picture_order(&cs[k + 1].labels(0, lab), &orders[k + 1]));
        }
        row
    };
    use Symbol::*;
    [chase(&[Arc, Arc, Plus]), chase(&[Arc, Arc, Minus])]
}


pub fn build<F: Field>(d: &TangleDiagram, field: F) -> (ChainComplex<F>, BigradedHomology<F>) {
    let c = ChainComplex::build(d, Functor::Tangle, field).unwrap();
    let h = BigradedHomology::compute(&c).unwrap();
    (c, h)
}

/// Index ranges of the blocks of degree `p`, in quantum order.
fn block_ranges<F: Field>(h: &BigradedHomology<F>, p: i64) -> Vec<(i64, std::ops::Range<usize>)> {
    let mut at = 0;
    h.blocks_in_degree(p)
        .map(|b| {
            let r = at..at + b.rank();
            at = r.end;
            (b.q, r)
        })
        .collect()
}

/// Birth of a circle embeds H(L) as H(L) ⊗ v+, one quantum degree up.
pub fn check_cap<F: Field>(d: &TangleDiagram, field: F) {
    let mut born = d.clone();
    born.free_circles += 1;
    let (c0, h0) = build(d, field.clone());
    let (c1, h1) = build(&born, field.clone());
    let f = cap_map(&c0, &c1).unwrap();
    verify_chain_map(&f, &c0, &c1).unwrap();
    let induced = induced_on_homology(&f, &h0, &h1).unwrap();
    assert_eq!(induced.q_shift, 1);
    for (&p, m) in &induced.by_degree {
        let rows = block_ranges(&h1, p);
        for (q, cols) in block_ranges(&h0, p) {
            let image = m.select_columns(&cols.collect::<Vec<_>>());
            let in_block: Vec<_> = rows
                .iter()
                .filter(|(qr, _)| *qr == q + 1)
                .flat_map(|(_, r)| r.clone())
                .collect();
            for (i, row) in image.rows.iter().enumerate() {
                if !in_block.contains(&i) {
                    assert!(row.iter().all(|x| field.is_zero(x)), "p={p} q={q}");
                }
            }
            assert_eq!(image.rank(&field), h0.rank(p, q), "p={p} q={q}");
        }
    }
}

/// Death of a circle is onto: x ⊗ v- maps to x.
pub fn check_cup<F: Field>(d: &TangleDiagram, field: F, which: usize) {
    let mut gone = d.clone();
    gone.free_circles -= 1;
    let (c0, h0) = build(d, field.clone());
    let (c1, h1) = build(&gone, field.clone());
    let f = cup_map(&c0, &c1, which).unwrap();
    verify_chain_map(&f, &c0, &c1).unwrap();
    let induced = induced_on_homology(&f, &h0, &h1).unwrap();
    for p in c1.degrees() {
        let rank = induced.by_degree.get(&p).map_or(0, |m| m.rank(&field));
        assert_eq!(rank, h1.total_rank(p), "p={p}");
    }
}

/// Saddle sites available on `d`.
pub fn sites(d: &TangleDiagram, rng: &mut StdRng) -> Vec<SaddleSite> {
    let mut out = Vec::new();
    let n = d.free_circles;
    if n >= 2 {
        out.push(SaddleSite::MergeFree { i: 0, j: n - 1 });
    }
    if n >= 1 {
        out.push(SaddleSite::SplitFree { i: rng.gen_range(0..n) });
    }
    if d.connections.is_empty() {
        return out;
    }
    let (a, b) = d.connections[rng.gen_range(0..d.connections.len())].clone();
    if n >= 1 {
        out.push(SaddleSite::MergeFreeInto { a: a.clone(), b: b.clone(), i: n - 1 });
    }
    out.push(SaddleSite::SplitOff { a: a.clone(), b: b.clone() });
    let (c, e) = d.connections[rng.gen_range(0..d.connections.len())].clone();
    if ![&a, &b].contains(&&c) && ![&a, &b].contains(&&e) {
        out.push(SaddleSite::Edges { a: a.clone(), b: b.clone(), c: c.clone(), d: e.clone() });
        out.push(SaddleSite::Edges { a, b, c: e, d: c });
    }
    out
}

/// The local saddle map equals the block of the cone differential, for
/// every kind of site on random diagrams with and without boundary.
/// Returns how many sites were checked.
pub fn check_saddles(seed: u64, rounds: usize) -> usize {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut checked = 0;
    let mut seen = std::collections::HashSet::new();
    let mut edges = 0;
    for round in 0..rounds {
        let mut d = if round % 2 == 0 {
            random_link(&mut rng, 5)
        } else {
            random_diagram(&mut rng, 5)
        };
        d.free_circles += rng.gen_range(0..=2);
        for site in sites(&d, &mut rng) {
            let after = site.apply(&d).unwrap();
            let c0 = ChainComplex::build(&d, Functor::Tangle, Rationals).unwrap();
            let cone = ChainComplex::build(&after, Functor::Tangle, Rationals)
                .map_err(|e| e.to_string())
                .and_then(|c1| Ok((cone_projection(&c0, &c1, &site).map_err(|e| e.to_string())?, c1)));
            let Ok((cone, c1)) = cone else {
                // only one pairing of two edges is untwisted
                assert!(matches!(site, SaddleSite::Edges { .. }), "{site:?}");
                continue;
            };
            let local = saddle_map(&c0, &c1, &site).unwrap();
            assert_eq!(local, cone, "{site:?} on {d:?}");
            verify_chain_map(&local, &c0, &c1).unwrap();
            assert_eq!(local.q_shift, -1);
            checked += 1;
            edges += usize::from(matches!(site, SaddleSite::Edges { .. }));
            seen.insert(std::mem::discriminant(&site));
        }
    }
    assert_eq!(seen.len(), 5);
    assert!(edges >= rounds / 6, "{edges}");
    checked
}

/// Every table of a module obeys the rank laws, and its bars account for
/// each homology group exactly once.
pub fn check_module<F: Field>(m: &PersistenceModule<F>) {
    for (run, r) in m.runs.iter().enumerate() {
        for p in m.degrees_in_run(run) {
            let t = m.rank_table(run, p);
            check_table(&t);
            for a in r.start..=r.end {
                assert_eq!(t.get((a - r.start) as isize, (a - r.start) as isize), m.homology[a].total_rank(p));
                for b in a..=r.end {
                    let direct = m.persistent_betti(a, b, p);
                    let total: i64 = direct.terms().map(|(_, c)| c).sum();
                    let local = |k: usize| (k - r.start) as isize;
                    assert_eq!(total as usize, t.get(local(a), local(b)), "p={p} {a}->{b}");
                }
            }
            let bars = m.barcode_from_ranks(run, &t);
            for k in r.start..=r.end {
                let g = m.grades[k];
                let alive: usize = bars
                    .iter()
                    .filter(|b| b.birth <= g && b.death.is_none_or(|d| g < d))
                    .map(|b| b.multiplicity)
                    .sum();
                assert_eq!(alive, m.homology[k].total_rank(p), "p={p} at {k}");
            }
        }
    }
}

pub fn check_table(t: &RankTable) {
    let n = t.len() as isize;
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                assert!(t.get(a, c) <= t.get(a, b).min(t.get(b, c)), "{a} {b} {c}: {t:?}");
            }
        }
    }
    for i in 0..t.len() {
        for j in i + 1..=t.len() {
            assert!(t.multiplicity(i, j) >= 0, "mu({i},{j}) in {t:?}");
        }
    }
}

