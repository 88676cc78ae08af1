//! Chain maps of the elementary cobordisms: cap (birth of a circle), cup
//! (death of a circle) and saddle.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ChainMap;
use crate::algebra::{Field, SaddleKind};
use crate::complex::{BuildOptions, ChainComplex, ComplexError, EdgePlan};
use crate::cube::{match_bystanders, CubeError, SaddleClassification};
use crate::diagram::{Crossing, DiagramError, Label, Resolution, Tangle, TangleDiagram};
use crate::linalg::{collect_sparse, SparseMatrix};

#[derive(Debug, Error)]
pub enum CobordismError {
    #[error("{0} maps are only defined for diagrams without boundary")]
    LinkModeOnly(&'static str),
    #[error("target diagram does not match the {0} applied to the source")]
    TargetMismatch(&'static str),
    #[error("free circle {0} does not exist")]
    NoSuchFreeCircle(usize),
    #[error("labels {0} and {1} are not joined by an edge")]
    NotAnEdge(Label, Label),
    #[error("invalid saddle site: {0}")]
    BadSite(String),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Where a saddle acts. Free circles are indexed as in the diagram. After a
/// merge of free circles `i < j` the result keeps index `i` and `j` is
/// removed; a split appends the second circle after all others.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SaddleSite {
    /// Edges `a-b` and `c-d` become `a-d` and `b-c`.
    Edges {
        a: Label,
        b: Label,
        c: Label,
        d: Label,
    },
    MergeFree {
        i: usize,
        j: usize,
    },
    SplitFree {
        i: usize,
    },
    /// Free circle `i` merges into edge `a-b`.
    MergeFreeInto {
        a: Label,
        b: Label,
        i: usize,
    },
    /// A free circle splits off edge `a-b`.
    SplitOff {
        a: Label,
        b: Label,
    },
}

#[derive(Clone, Copy)]
enum Side {
    Before,
    After,
}

fn take_edge(d: &mut TangleDiagram, a: &Label, b: &Label) -> Result<(), CobordismError> {
    let k = d
        .connections
        .iter()
        .position(|(x, y)| (x == a && y == b) || (x == b && y == a))
        .ok_or_else(|| CobordismError::NotAnEdge(a.clone(), b.clone()))?;
    d.connections.remove(k);
    Ok(())
}

impl SaddleSite {
    fn free_indices(&self) -> (usize, usize) {
        match *self {
            SaddleSite::MergeFree { i, j } => (i.min(j), i.max(j)),
            SaddleSite::SplitFree { i } | SaddleSite::MergeFreeInto { i, .. } => (i, i),
            _ => (0, 0),
        }
    }

    fn check_free(&self, d: &TangleDiagram) -> Result<(), CobordismError> {
        match *self {
            SaddleSite::MergeFree { i, j } if i == j => Err(CobordismError::BadSite(
                "a circle cannot merge with itself".into(),
            )),
            SaddleSite::MergeFree { .. }
            | SaddleSite::SplitFree { .. }
            | SaddleSite::MergeFreeInto { .. } => {
                let (_, hi) = self.free_indices();
                if hi >= d.free_circles {
                    Err(CobordismError::NoSuchFreeCircle(hi))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// The diagram after the saddle.
    pub fn apply(&self, d: &TangleDiagram) -> Result<TangleDiagram, CobordismError> {
        self.check_free(d)?;
        let mut out = d.clone();
        match self {
            SaddleSite::Edges { a, b, c, d: e } => {
                let distinct: HashSet<&Label> = [a, b, c, e].into_iter().collect();
                if distinct.len() != 4 {
                    return Err(CobordismError::BadSite(
                        "edge labels must be distinct".into(),
                    ));
                }
                take_edge(&mut out, a, b)?;
                take_edge(&mut out, c, e)?;
                out.connections.push((a.clone(), e.clone()));
                out.connections.push((b.clone(), c.clone()));
            }
            SaddleSite::MergeFree { .. } | SaddleSite::MergeFreeInto { .. } => {
                if let SaddleSite::MergeFreeInto { a, b, .. } = self {
                    take_edge(&mut out.clone(), a, b)?;
                }
                out.free_circles -= 1;
            }
            SaddleSite::SplitFree { .. } => out.free_circles += 1,
            SaddleSite::SplitOff { a, b } => {
                take_edge(&mut out.clone(), a, b)?;
                out.free_circles += 1;
            }
        }
        Ok(out)
    }

    /// The diagram with one extra positive crossing at the site, placed first
    /// in crossing order, whose 0- and 1-smoothings are the diagrams before
    /// and after the saddle.
    pub fn cone(&self, d: &TangleDiagram) -> Result<TangleDiagram, CobordismError> {
        self.check_free(d)?;
        let mut out = d.clone();
        let id = d.crossings.iter().map(|c| c.id).min().map_or(0, |m| m - 1);
        let taken: HashSet<Label> = d
            .boundary
            .iter()
            .chain(d.crossings.iter().flat_map(|c| c.ports.iter()))
            .cloned()
            .collect();
        let x: [Label; 4] = std::array::from_fn(|k| {
            let mut name = format!("s.{k}");
            while taken.contains(&Label::Str(name.clone())) {
                name.push('\'');
            }
            Label::Str(name)
        });
        let link = |out: &mut TangleDiagram, a: &Label, k: usize| {
            out.connections.push((a.clone(), x[k].clone()))
        };
        let loop_pair = |out: &mut TangleDiagram, k: usize, l: usize| {
            out.connections.push((x[k].clone(), x[l].clone()))
        };
        match self {
            SaddleSite::Edges { a, b, c, d: e } => {
                take_edge(&mut out, a, b)?;
                take_edge(&mut out, c, e)?;
                for (label, k) in [(a, 0), (b, 1), (c, 2), (e, 3)] {
                    link(&mut out, label, k);
                }
            }
            SaddleSite::MergeFree { .. } => {
                out.free_circles -= 2;
                loop_pair(&mut out, 0, 1);
                loop_pair(&mut out, 2, 3);
            }
            SaddleSite::SplitFree { .. } => {
                out.free_circles -= 1;
                loop_pair(&mut out, 1, 2);
                loop_pair(&mut out, 3, 0);
            }
            SaddleSite::MergeFreeInto { a, b, .. } => {
                take_edge(&mut out, a, b)?;
                out.free_circles -= 1;
                link(&mut out, a, 0);
                link(&mut out, b, 1);
                loop_pair(&mut out, 2, 3);
            }
            SaddleSite::SplitOff { a, b } => {
                take_edge(&mut out, a, b)?;
                link(&mut out, a, 0);
                link(&mut out, b, 3);
                loop_pair(&mut out, 1, 2);
            }
        }
        out.crossings.push(Crossing {
            id,
            ports: x,
            sign: 1,
        });
        Ok(out)
    }

    fn node(t: &Tangle, label: &Label) -> usize {
        t.node_of_label(label).expect("site label checked by apply")
    }

    /// Components touching the site, before or after the saddle.
    fn active(&self, t: &Tangle, r: &Resolution, side: Side) -> Vec<usize> {
        let comp = |l: &Label| r.component_of(Self::node(t, l));
        let (lo, hi) = self.free_indices();
        let last = r.free_count().saturating_sub(1);
        let mut a = match (self, side) {
            (SaddleSite::Edges { a, c, .. }, Side::Before) => vec![comp(a), comp(c)],
            (SaddleSite::Edges { a, b, .. }, Side::After) => vec![comp(a), comp(b)],
            (SaddleSite::MergeFree { .. }, Side::Before) => {
                vec![r.free_circle(lo), r.free_circle(hi)]
            }
            (SaddleSite::MergeFree { .. }, Side::After) => vec![r.free_circle(lo)],
            (SaddleSite::SplitFree { .. }, Side::Before) => vec![r.free_circle(lo)],
            (SaddleSite::SplitFree { .. }, Side::After) => {
                vec![r.free_circle(lo), r.free_circle(last)]
            }
            (SaddleSite::MergeFreeInto { a, .. }, Side::Before) => vec![comp(a), r.free_circle(lo)],
            (SaddleSite::MergeFreeInto { a, .. }, Side::After) => vec![comp(a)],
            (SaddleSite::SplitOff { a, .. }, Side::Before) => vec![comp(a)],
            (SaddleSite::SplitOff { a, .. }, Side::After) => vec![comp(a), r.free_circle(last)],
        };
        a.sort_unstable();
        a.dedup();
        a
    }

    /// Free circles of the plain diagram that run through the cone crossing,
    /// with the cone port each passes.
    fn cone_circles(&self, plain_free: usize, side: Side) -> Vec<(usize, usize)> {
        let (lo, hi) = self.free_indices();
        let last = plain_free.saturating_sub(1);
        match (self, side) {
            (SaddleSite::MergeFree { .. }, Side::Before) => vec![(lo, 0), (hi, 2)],
            (SaddleSite::MergeFree { .. }, Side::After) => vec![(lo, 0)],
            (SaddleSite::SplitFree { .. }, Side::Before) => vec![(lo, 0)],
            (SaddleSite::SplitFree { .. }, Side::After) => vec![(lo, 0), (last, 1)],
            (SaddleSite::MergeFreeInto { .. }, Side::Before) => vec![(lo, 2)],
            (SaddleSite::SplitOff { .. }, Side::After) => vec![(last, 1)],
            _ => Vec::new(),
        }
    }

    fn name(&self) -> &'static str {
        "saddle"
    }
}

fn check_target<F: Field>(
    dst: &ChainComplex<F>,
    expected: TangleDiagram,
    what: &'static str,
) -> Result<(), CobordismError> {
    if Tangle::new(expected)?.structure() != dst.tangle().structure() {
        return Err(CobordismError::TargetMismatch(what));
    }
    Ok(())
}

fn circle_bit(res: &Resolution, component: usize) -> Option<u32> {
    res.circle_ordinal(component)
        .map(|j| (res.r - 1 - j) as u32)
}

/// Assemble a degree-preserving map from a per-state column builder.
fn assemble<F, G>(
    src: &ChainComplex<F>,
    dst: &ChainComplex<F>,
    q_shift: i64,
    column: G,
) -> Result<ChainMap<F::Elem>, CobordismError>
where
    F: Field,
    G: Fn(u64, &mut dyn FnMut(Vec<(usize, i64)>)) -> Result<(), CobordismError> + Sync,
{
    let field = src.field();
    let maps = src
        .degrees()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| {
            let mut cols = Vec::with_capacity(src.dim(p));
            for &s in src.states(p) {
                column(s, &mut |entries| {
                    cols.push(collect_sparse(
                        field,
                        entries.into_iter().map(|(r, c)| (r, field.from_i64(c))),
                    ));
                })?;
            }
            Ok(SparseMatrix {
                nrows: dst.dim(p),
                cols,
            })
        })
        .collect::<Result<Vec<_>, CobordismError>>()?;
    Ok(ChainMap {
        min_degree: src.min_degree(),
        maps,
        q_shift,
    })
}

/// Birth of a circle: `x -> x ⊗ v+`, the new circle being the last free one.
pub fn cap_map<F: Field>(
    src: &ChainComplex<F>,
    dst: &ChainComplex<F>,
) -> Result<ChainMap<F::Elem>, CobordismError> {
    let d = src.tangle().diagram();
    if !d.boundary.is_empty() {
        return Err(CobordismError::LinkModeOnly("cap"));
    }
    let mut expected = d.clone();
    expected.free_circles += 1;
    check_target(dst, expected, "cap")?;
    assemble(src, dst, 1, |s, emit| {
        for lab in 0..1u64 << src.resolution(s).r {
            emit(vec![(dst.index_of(s, lab << 1), 1)]);
        }
        Ok(())
    })
}

/// Death of free circle `free_circle`: `x ⊗ v+ -> 0`, `x ⊗ v- -> x`.
pub fn cup_map<F: Field>(
    src: &ChainComplex<F>,
    dst: &ChainComplex<F>,
    free_circle: usize,
) -> Result<ChainMap<F::Elem>, CobordismError> {
    let d = src.tangle().diagram();
    if !d.boundary.is_empty() {
        return Err(CobordismError::LinkModeOnly("cup"));
    }
    if free_circle >= d.free_circles {
        return Err(CobordismError::NoSuchFreeCircle(free_circle));
    }
    let mut expected = d.clone();
    expected.free_circles -= 1;
    check_target(dst, expected, "cup")?;
    assemble(src, dst, 1, |s, emit| {
        let rs = src.resolution(s);
        let b = circle_bit(rs, rs.free_circle(free_circle)).expect("free circle");
        for lab in 0..1u64 << rs.r {
            if lab >> b & 1 == 0 {
                emit(Vec::new());
            } else {
                let low = lab & ((1 << b) - 1);
                let high = lab >> (b + 1);
                emit(vec![(dst.index_of(s, high << b | low), 1)]);
            }
        }
        Ok(())
    })
}

/// The saddle applied state by state with the local merge/split maps.
pub fn saddle_map<F: Field>(
    src: &ChainComplex<F>,
    dst: &ChainComplex<F>,
    site: &SaddleSite,
) -> Result<ChainMap<F::Elem>, CobordismError> {
    let (ts, tt) = (src.tangle(), dst.tangle());
    check_target(dst, site.apply(ts.diagram())?, site.name())?;
    assemble(src, dst, -1, |s, emit| {
        let (rs, rt) = (src.resolution(s), dst.resolution(s));
        let active_source = site.active(ts, rs, Side::Before);
        let active_target = site.active(tt, rt, Side::After);
        let ks: Vec<_> = active_source.iter().map(|&c| rs.kind(c)).collect();
        let kt: Vec<_> = active_target.iter().map(|&c| rt.kind(c)).collect();
        let kind = SaddleKind::from_kinds(&ks, &kt)
            .ok_or(CubeError::UnknownPattern { from: ks, to: kt })?;
        let bystanders = match_bystanders(rs, &active_source, rt, &active_target, |n| n)?;
        let class = SaddleClassification {
            kind,
            active_source,
            active_target,
            bystanders,
        };
        let plan = EdgePlan::new(&class, rs, rt, 1, dst.index_of(s, 0));
        let mut scratch = Vec::new();
        for lab in 0..1u64 << rs.r {
            scratch.clear();
            plan.push_image(lab, &mut scratch);
            emit(scratch.clone());
        }
        Ok(())
    })
}

/// Components of a plain resolution matched with the cone resolution that
/// restricts to it.
fn cone_match(
    plain: &Tangle,
    rp: &Resolution,
    cone: &Tangle,
    rc: &Resolution,
    through: &[(usize, usize)],
) -> Result<Vec<usize>, CobordismError> {
    let lift = |n: usize| match plain.port_of(n) {
        None => n,
        Some((c, k)) => cone.port_node(c + 1, k),
    };
    let mut spare_free = (0..rc.free_count()).map(|k| rc.free_circle(k));
    let mut out = Vec::with_capacity(rp.components.len());
    let first_free = rp.components.len() - rp.free_count();
    for (c, comp) in rp.components.iter().enumerate() {
        let image = if let Some(&n) = comp.nodes.first() {
            rc.component_of(lift(n))
        } else {
            let k = c - first_free;
            match through.iter().find(|(f, _)| *f == k) {
                Some(&(_, port)) => rc.component_of(cone.port_node(0, port)),
                None => spare_free.next().ok_or(CubeError::Bystander(c))?,
            }
        };
        if rc.kind(image) != comp.kind {
            return Err(CubeError::Bystander(c).into());
        }
        out.push(image);
    }
    Ok(out)
}

/// The saddle map read off the complex of the cone diagram: the block of its
/// differential from states with the cone crossing at 0 to states with it at 1.
pub fn cone_projection<F: Field>(
    src: &ChainComplex<F>,
    dst: &ChainComplex<F>,
    site: &SaddleSite,
) -> Result<ChainMap<F::Elem>, CobordismError> {
    let (ts, tt) = (src.tangle(), dst.tangle());
    check_target(dst, site.apply(ts.diagram())?, site.name())?;
    let cone_complex = ChainComplex::build_with(
        &site.cone(ts.diagram())?,
        src.functor(),
        src.field().clone(),
        BuildOptions::default(),
    )?;
    let tc = cone_complex.tangle();
    let before = site.cone_circles(ts.free_circles(), Side::Before);
    let after = site.cone_circles(tt.free_circles(), Side::After);
    let field = src.field();
    assemble(src, dst, -1, |s, emit| {
        let p = src.degree_of_state(s);
        let (rs, rt) = (src.resolution(s), dst.resolution(s));
        let (s0, s1) = (s << 1, s << 1 | 1);
        let down = cone_match(ts, rs, tc, cone_complex.resolution(s0), &before)?;
        let up = cone_match(tt, rt, tc, cone_complex.resolution(s1), &after)?;
        let rc0 = cone_complex.resolution(s0);
        let rc1 = cone_complex.resolution(s1);
        let lift: Vec<(u32, u32)> = down
            .iter()
            .enumerate()
            .filter_map(|(c, &d)| Some((circle_bit(rs, c)?, circle_bit(rc0, d)?)))
            .collect();
        let lower: Vec<(u32, u32)> = up
            .iter()
            .enumerate()
            .filter_map(|(c, &d)| Some((circle_bit(rc1, d)?, circle_bit(rt, c)?)))
            .collect();
        let d = cone_complex
            .differential(p)
            .expect("cone has a degree above");
        for lab in 0..1u64 << rs.r {
            let cone_lab = lift
                .iter()
                .fold(0, |acc, &(a, b)| acc | (lab >> a & 1) << b);
            let col = &d.cols[cone_complex.index_of(s0, cone_lab)];
            let mut entries = Vec::new();
            for (row, e) in col {
                let (t, t_lab) = cone_complex.locate(p + 1, *row);
                if t != s1 {
                    continue;
                }
                let plain = lower
                    .iter()
                    .fold(0, |acc, &(a, b)| acc | (t_lab >> a & 1) << b);
                let coeff = if field.is_one(e) {
                    1
                } else if field.is_one(&field.neg(e)) {
                    -1
                } else {
                    return Err(CobordismError::BadSite(format!(
                        "unexpected coefficient {}",
                        field.format(e)
                    )));
                };
                entries.push((dst.index_of(s, plain), coeff));
            }
            emit(entries);
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Functor, Rationals};
    use crate::diagram::builders::braid;
    use crate::persistence::verify_chain_map;

    fn complex(d: &TangleDiagram) -> ChainComplex<Rationals> {
        ChainComplex::build(d, Functor::Tangle, Rationals).unwrap()
    }

    #[test]
    fn cap_on_empty_link_is_unit() {
        let empty = TangleDiagram::default();
        let circle = braid(1, &[], 1);
        let (c0, c1) = (complex(&empty), complex(&circle));
        let f = cap_map(&c0, &c1).unwrap();
        assert_eq!(
            c1.generator(0, f.at(0).unwrap().cols[0][0].0).to_string(),
            "v+"
        );
        assert!(verify_chain_map(&f, &c0, &c1).is_ok());
    }

    #[test]
    fn cup_after_cap_vanishes() {
        let unknot = braid(1, &[], 1);
        let two = braid(2, &[], 2);
        let (c1, c2) = (complex(&unknot), complex(&two));
        let cap = cap_map(&c1, &c2).unwrap();
        let cup = cup_map(&c2, &c1, 1).unwrap();
        assert!(cap
            .then(&Rationals, &cup)
            .maps
            .iter()
            .all(SparseMatrix::is_zero));
        // v+ ⊗ v- -> v+
        let col = &cup.at(0).unwrap().cols[1];
        assert_eq!(c2.generator(0, 1).to_string(), "v+⊗v-");
        assert_eq!(c1.generator(0, col[0].0).to_string(), "v+");
    }

    #[test]
    fn cap_needs_a_link() {
        let arc = braid(1, &[], 0);
        let mut plus = arc.clone();
        plus.free_circles = 1;
        assert!(matches!(
            cap_map(&complex(&arc), &complex(&plus)),
            Err(CobordismError::LinkModeOnly("cap"))
        ));
    }

    #[test]
    fn free_merge_and_split() {
        let two = braid(2, &[], 2);
        let one = braid(1, &[], 1);
        let (c2, c1) = (complex(&two), complex(&one));
        let m = saddle_map(&c2, &c1, &SaddleSite::MergeFree { i: 0, j: 1 }).unwrap();
        let images: Vec<usize> = m.at(0).unwrap().cols.iter().map(Vec::len).collect();
        assert_eq!(images, vec![1, 1, 1, 0]);
        let delta = saddle_map(&c1, &c2, &SaddleSite::SplitFree { i: 0 }).unwrap();
        assert_eq!(delta.at(0).unwrap().cols[0].len(), 2);
        for (f, a, b) in [(&m, &c2, &c1), (&delta, &c1, &c2)] {
            assert!(verify_chain_map(f, a, b).is_ok());
        }
        assert_eq!(
            m,
            cone_projection(&c2, &c1, &SaddleSite::MergeFree { i: 0, j: 1 }).unwrap()
        );
        assert_eq!(
            delta,
            cone_projection(&c1, &c2, &SaddleSite::SplitFree { i: 0 }).unwrap()
        );
    }

    #[test]
    fn cone_smoothings_recover_both_ends() {
        let hopf = braid(2, &[1, 1], 2);
        let (a, b) = hopf.connections[0].clone();
        let (c, d) = hopf.connections[1].clone();
        // only one of the two reconnections is an untwisted band
        let (site, after) = [
            SaddleSite::Edges {
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
                d: d.clone(),
            },
            SaddleSite::Edges { a, b, c: d, d: c },
        ]
        .into_iter()
        .map(|site| {
            let after = site.apply(&hopf).unwrap();
            (site, after)
        })
        .find(|(_, after)| ChainComplex::build(after, Functor::Tangle, Rationals).is_ok())
        .unwrap();
        let cone = Tangle::new(site.cone(&hopf).unwrap()).unwrap();
        assert_eq!(cone.n(), 3);
        let r0 = cone.resolve(0);
        let r1 = cone.resolve(1);
        assert_eq!(r0.r, Tangle::new(hopf.clone()).unwrap().resolve(0).r);
        assert_eq!(r1.r, Tangle::new(after.clone()).unwrap().resolve(0).r);
        let (c0, c1) = (complex(&hopf), complex(&after));
        let direct = saddle_map(&c0, &c1, &site).unwrap();
        assert!(verify_chain_map(&direct, &c0, &c1).is_ok());
        assert_eq!(direct, cone_projection(&c0, &c1, &site).unwrap());
    }
}
