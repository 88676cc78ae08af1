//! One-hole planar operators: an annulus with non-crossing arcs that embeds a
//! tangle in a larger disk.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Crossing, DiagramError, Label, Tangle, TangleDiagram};
use crate::persistence::{
    ClosedArc, ClosureMorphismSpec, ComponentMap, EndpointFate, NewComponent,
};

#[derive(Debug, Error)]
pub enum PlanarError {
    #[error("planar operators may not contain crossings")]
    HasCrossings,
    #[error("operator hole has {expected} points but the tangle has {got} boundary endpoints")]
    SizeMismatch { expected: usize, got: usize },
    #[error("operator arcs are not a perfect matching: {0}")]
    NotMatching(String),
    #[error("operator pairing is not planar: {0}")]
    NotPlanar(String),
    #[error("operators do not compose: outer size {outer} against hole size {inner}")]
    NotComposable { outer: usize, inner: usize },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A point on the hole boundary or on the outer boundary, counterclockwise
/// from the base point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanarPoint {
    Inner(usize),
    Outer(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarTangleSpec {
    /// Number of outer boundary points.
    pub outer: usize,
    /// Number of hole boundary points.
    pub inner: usize,
    pub arcs: Vec<(PlanarPoint, PlanarPoint)>,
    #[serde(default)]
    pub circles: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub crossings: Vec<Crossing>,
}

struct Matching {
    inner: Vec<PlanarPoint>,
    outer: Vec<PlanarPoint>,
}

impl Matching {
    fn of(&self, p: PlanarPoint) -> PlanarPoint {
        match p {
            PlanarPoint::Inner(i) => self.inner[i],
            PlanarPoint::Outer(j) => self.outer[j],
        }
    }
}

/// True when the pairing of positions `0..len` (given as partner indices) is
/// a non-crossing parenthesisation of the sequence.
fn non_crossing(partner: &[usize]) -> bool {
    let mut stack = Vec::new();
    for (pos, &other) in partner.iter().enumerate() {
        if other > pos {
            stack.push(pos);
        } else if stack.pop() != Some(other) {
            return false;
        }
    }
    stack.is_empty()
}

impl PlanarTangleSpec {
    pub fn identity(n: usize) -> Self {
        PlanarTangleSpec {
            outer: n,
            inner: n,
            arcs: (0..n)
                .map(|i| (PlanarPoint::Inner(i), PlanarPoint::Outer(i)))
                .collect(),
            circles: 0,
            crossings: Vec::new(),
        }
    }

    /// Closes a two-endpoint tangle into a link.
    pub fn closure() -> Self {
        PlanarTangleSpec {
            outer: 0,
            inner: 2,
            arcs: vec![(PlanarPoint::Inner(0), PlanarPoint::Inner(1))],
            circles: 0,
            crossings: Vec::new(),
        }
    }

    fn matching(&self) -> Result<Matching, PlanarError> {
        let mut inner = vec![None; self.inner];
        let mut outer = vec![None; self.outer];
        let mut set = |p: PlanarPoint, q: PlanarPoint| -> Result<(), PlanarError> {
            let slot = match p {
                PlanarPoint::Inner(i) => inner.get_mut(i),
                PlanarPoint::Outer(j) => outer.get_mut(j),
            }
            .ok_or_else(|| PlanarError::NotMatching(format!("{p:?} is out of range")))?;
            if slot.replace(q).is_some() {
                return Err(PlanarError::NotMatching(format!("{p:?} is used twice")));
            }
            Ok(())
        };
        for &(a, b) in &self.arcs {
            if a == b {
                return Err(PlanarError::NotMatching(format!(
                    "{a:?} is paired with itself"
                )));
            }
            set(a, b)?;
            set(b, a)?;
        }
        let unwrap = |v: Vec<Option<PlanarPoint>>, outer: bool| {
            v.into_iter()
                .enumerate()
                .map(|(i, p)| {
                    p.ok_or_else(|| {
                        let point = if outer {
                            PlanarPoint::Outer(i)
                        } else {
                            PlanarPoint::Inner(i)
                        };
                        PlanarError::NotMatching(format!("{point:?} is unpaired"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(Matching {
            inner: unwrap(inner, false)?,
            outer: unwrap(outer, true)?,
        })
    }

    /// Check the operator is a crossing-free planar matching in the annulus.
    pub fn validate(&self) -> Result<(), PlanarError> {
        if !self.crossings.is_empty() {
            return Err(PlanarError::HasCrossings);
        }
        let m = self.matching()?;
        let through: Vec<(usize, usize)> = m
            .inner
            .iter()
            .enumerate()
            .filter_map(|(i, p)| match p {
                PlanarPoint::Outer(j) => Some((i, *j)),
                PlanarPoint::Inner(_) => None,
            })
            .collect();

        if through.is_empty() {
            for (side, partners) in [("hole", &m.inner), ("outer", &m.outer)] {
                let idx: Vec<usize> = partners
                    .iter()
                    .map(|p| match p {
                        PlanarPoint::Inner(i) | PlanarPoint::Outer(i) => *i,
                    })
                    .collect();
                if !non_crossing(&idx) {
                    return Err(PlanarError::NotPlanar(format!("{side} arcs cross")));
                }
            }
            return Ok(());
        }

        let k = through.len();
        let descents = (0..k)
            .filter(|&t| through[(t + 1) % k].1 < through[t].1)
            .count();
        if descents > 1 {
            return Err(PlanarError::NotPlanar(
                "through-strands change cyclic order".into(),
            ));
        }
        for t in 0..k {
            let (ai, aj) = through[t];
            let (bi, bj) = through[(t + 1) % k];
            let mut seq: Vec<PlanarPoint> = Vec::new();
            let mut i = (ai + 1) % self.inner;
            while i != bi {
                seq.push(PlanarPoint::Inner(i));
                i = (i + 1) % self.inner;
            }
            let mut outer_gap = Vec::new();
            let mut j = (aj + 1) % self.outer;
            while j != bj {
                outer_gap.push(PlanarPoint::Outer(j));
                j = (j + 1) % self.outer;
            }
            seq.extend(outer_gap.into_iter().rev());
            let mut partner = Vec::with_capacity(seq.len());
            for p in &seq {
                let q = m.of(*p);
                let pos = seq.iter().position(|x| *x == q).ok_or_else(|| {
                    PlanarError::NotPlanar(format!("{p:?} is paired across a through-strand"))
                })?;
                partner.push(pos);
            }
            if !non_crossing(&partner) {
                return Err(PlanarError::NotPlanar(
                    "arcs cross between through-strands".into(),
                ));
            }
        }
        Ok(())
    }

    /// Operator equivalent to applying `self` and then `next`.
    pub fn then(&self, next: &PlanarTangleSpec) -> Result<PlanarTangleSpec, PlanarError> {
        if self.outer != next.inner {
            return Err(PlanarError::NotComposable {
                outer: self.outer,
                inner: next.inner,
            });
        }
        let first = self.matching()?;
        let second = next.matching()?;
        let mut middle_seen = vec![false; self.outer];
        let mut arcs = Vec::new();
        let mut done_inner = vec![false; self.inner];
        let mut done_outer = vec![false; next.outer];

        // Follow from a point of the composite through the middle circle.
        let trace = |start: PlanarPoint, seen: &mut Vec<bool>| -> PlanarPoint {
            let mut cur = match start {
                PlanarPoint::Inner(a) => match first.inner[a] {
                    PlanarPoint::Inner(a2) => return PlanarPoint::Inner(a2),
                    PlanarPoint::Outer(m) => m,
                },
                PlanarPoint::Outer(b) => match second.outer[b] {
                    PlanarPoint::Outer(b2) => return PlanarPoint::Outer(b2),
                    PlanarPoint::Inner(m) => {
                        seen[m] = true;
                        match first.outer[m] {
                            PlanarPoint::Inner(a) => return PlanarPoint::Inner(a),
                            PlanarPoint::Outer(m2) => m2,
                        }
                    }
                },
            };
            loop {
                seen[cur] = true;
                let m2 = match second.inner[cur] {
                    PlanarPoint::Outer(b) => return PlanarPoint::Outer(b),
                    PlanarPoint::Inner(m2) => m2,
                };
                seen[m2] = true;
                cur = match first.outer[m2] {
                    PlanarPoint::Inner(a) => return PlanarPoint::Inner(a),
                    PlanarPoint::Outer(m3) => m3,
                };
            }
        };
        let starts: Vec<PlanarPoint> = (0..self.inner)
            .map(PlanarPoint::Inner)
            .chain((0..next.outer).map(PlanarPoint::Outer))
            .collect();
        for start in starts {
            let done = match start {
                PlanarPoint::Inner(a) => done_inner[a],
                PlanarPoint::Outer(b) => done_outer[b],
            };
            if done {
                continue;
            }
            let end = trace(start, &mut middle_seen);
            for p in [start, end] {
                match p {
                    PlanarPoint::Inner(a) => done_inner[a] = true,
                    PlanarPoint::Outer(b) => done_outer[b] = true,
                }
            }
            arcs.push((start, end));
        }
        let mut loops = 0;
        for m in 0..self.outer {
            if middle_seen[m] {
                continue;
            }
            loops += 1;
            let mut cur = m;
            loop {
                middle_seen[cur] = true;
                let PlanarPoint::Inner(m2) = second.inner[cur] else {
                    unreachable!()
                };
                middle_seen[m2] = true;
                let PlanarPoint::Outer(m3) = first.outer[m2] else {
                    unreachable!()
                };
                if m3 == m {
                    break;
                }
                cur = m3;
            }
        }
        Ok(PlanarTangleSpec {
            outer: next.outer,
            inner: self.inner,
            arcs,
            circles: self.circles + next.circles + loops,
            crossings: Vec::new(),
        })
    }
}

/// Result of inserting a tangle into a planar operator.
#[derive(Clone, Debug)]
pub struct PlanarOutput {
    pub diagram: TangleDiagram,
    pub morphism: ClosureMorphismSpec,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum End {
    Port(usize),
    Outer(usize),
}

/// Insert `inner` into the hole of `op`.
///
/// Crossings are kept with their labels. An outer point joined directly to a
/// hole point inherits that point's label; other outer points get fresh
/// labels. Free circles are numbered: the tangle's own, then loops closed
/// from crossing-free arcs (by smallest endpoint), then the operator's.
pub fn apply_planar(
    op: &PlanarTangleSpec,
    inner: &TangleDiagram,
) -> Result<PlanarOutput, PlanarError> {
    op.validate()?;
    let t = Tangle::new(inner.clone())?;
    if t.boundary_len() != op.inner {
        return Err(PlanarError::SizeMismatch {
            expected: op.inner,
            got: t.boundary_len(),
        });
    }
    let m = op.matching()?;

    let mut taken: HashSet<Label> = (0..t.node_count()).map(|n| t.label(n).clone()).collect();
    let mut outer_labels = Vec::with_capacity(op.outer);
    for j in 0..op.outer {
        let label = match m.outer[j] {
            PlanarPoint::Inner(i) => t.label(i).clone(),
            PlanarPoint::Outer(_) => {
                let mut name = format!("o{j}");
                while taken.contains(&Label::Str(name.clone())) {
                    name.push('\'');
                }
                Label::Str(name)
            }
        };
        taken.insert(label.clone());
        outer_labels.push(label);
    }

    let mut seen_inner = vec![false; op.inner];
    let follow_from_node = |mut y: usize, seen: &mut Vec<bool>| -> End {
        loop {
            if !t.is_boundary(y) {
                return End::Port(y);
            }
            seen[y] = true;
            match m.inner[y] {
                PlanarPoint::Outer(j) => return End::Outer(j),
                PlanarPoint::Inner(i2) => {
                    seen[i2] = true;
                    y = t.partner(i2);
                }
            }
        }
    };

    let mut connections = Vec::new();
    let mut port_done = vec![false; t.node_count()];
    let mut outer_done = vec![false; op.outer];
    let mark = |e: End, port_done: &mut Vec<bool>, outer_done: &mut Vec<bool>| match e {
        End::Port(n) => port_done[n] = true,
        End::Outer(j) => outer_done[j] = true,
    };
    let label_of = |e: End| match e {
        End::Port(n) => t.label(n).clone(),
        End::Outer(j) => outer_labels[j].clone(),
    };
    for node in t.boundary_len()..t.node_count() {
        if port_done[node] {
            continue;
        }
        let end = follow_from_node(t.partner(node), &mut seen_inner);
        mark(End::Port(node), &mut port_done, &mut outer_done);
        mark(end, &mut port_done, &mut outer_done);
        connections.push((label_of(End::Port(node)), label_of(end)));
    }
    let mut new = Vec::new();
    for j in 0..op.outer {
        if outer_done[j] {
            continue;
        }
        let end = match m.outer[j] {
            PlanarPoint::Outer(j2) => {
                new.push(NewComponent::Arc {
                    endpoints: [j.min(j2), j.max(j2)],
                });
                End::Outer(j2)
            }
            PlanarPoint::Inner(i) => {
                seen_inner[i] = true;
                follow_from_node(t.partner(i), &mut seen_inner)
            }
        };
        mark(End::Outer(j), &mut port_done, &mut outer_done);
        mark(end, &mut port_done, &mut outer_done);
        connections.push((outer_labels[j].clone(), label_of(end)));
    }

    let mut closed_arcs = Vec::new();
    let mut free = t.free_circles();
    for i in 0..op.inner {
        if seen_inner[i] {
            continue;
        }
        let mut cur = i;
        loop {
            let other = t.partner(cur);
            seen_inner[cur] = true;
            seen_inner[other] = true;
            closed_arcs.push(ClosedArc {
                endpoints: [cur.min(other), cur.max(other)],
                free_circle: free,
            });
            let PlanarPoint::Inner(next) = m.inner[other] else {
                unreachable!()
            };
            if next == i {
                break;
            }
            cur = next;
        }
        free += 1;
    }
    for _ in 0..op.circles {
        new.push(NewComponent::Circle {
            free_circle: free,
            from_arc: false,
        });
        free += 1;
    }
    closed_arcs.sort();

    let endpoints = m
        .inner
        .iter()
        .map(|p| match p {
            PlanarPoint::Outer(j) => EndpointFate::Outer(*j),
            PlanarPoint::Inner(i) => EndpointFate::Joined(*i),
        })
        .collect();
    let diagram = TangleDiagram {
        boundary: outer_labels,
        crossings: inner.crossings.clone(),
        connections,
        free_circles: free,
    };
    let morphism = ClosureMorphismSpec {
        component_map: ComponentMap {
            endpoints,
            free_circles: (0..t.free_circles()).collect(),
            closed_arcs,
        },
        new,
    };
    Ok(PlanarOutput { diagram, morphism })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::builders::braid;
    use crate::diagram::ComponentKind;
    use PlanarPoint::{Inner, Outer};

    fn op(
        outer: usize,
        inner: usize,
        arcs: &[(PlanarPoint, PlanarPoint)],
        circles: usize,
    ) -> PlanarTangleSpec {
        PlanarTangleSpec {
            outer,
            inner,
            arcs: arcs.to_vec(),
            circles,
            crossings: Vec::new(),
        }
    }

    #[test]
    fn identity_is_identity() {
        let d = braid(2, &[1, 1, -1], 0);
        let out = apply_planar(&PlanarTangleSpec::identity(4), &d).unwrap();
        assert_eq!(out.diagram.normalized(), d.normalized());
        assert!(out.morphism.is_identity());
    }

    #[test]
    fn closing_an_arc_gives_a_link() {
        let d = braid(1, &[], 0);
        let out = apply_planar(&PlanarTangleSpec::closure(), &d).unwrap();
        assert!(out.diagram.boundary.is_empty());
        assert_eq!(out.diagram.free_circles, 1);
        assert_eq!(
            out.morphism.component_map.closed_arcs,
            vec![ClosedArc {
                endpoints: [0, 1],
                free_circle: 0
            }]
        );

        let kinked = crate::diagram::builders::add_kink(&d, 0, -1);
        let out = apply_planar(&PlanarTangleSpec::closure(), &kinked).unwrap();
        let t = Tangle::new(out.diagram).unwrap();
        let r = t.resolve(0);
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.kind(0), ComponentKind::Circle);
    }

    #[test]
    fn extra_circle_is_recorded_as_new() {
        let d = braid(2, &[1], 0);
        let mut o = PlanarTangleSpec::identity(4);
        o.circles = 1;
        let out = apply_planar(&o, &d).unwrap();
        assert_eq!(out.diagram.free_circles, 1);
        assert_eq!(
            out.morphism.new,
            vec![NewComponent::Circle {
                free_circle: 0,
                from_arc: false
            }]
        );
    }

    #[test]
    fn planarity_checks() {
        assert!(op(0, 4, &[(Inner(0), Inner(2)), (Inner(1), Inner(3))], 0)
            .validate()
            .is_err());
        assert!(op(0, 4, &[(Inner(0), Inner(3)), (Inner(1), Inner(2))], 0)
            .validate()
            .is_ok());
        // through-strands swapped
        assert!(op(2, 2, &[(Inner(0), Outer(1)), (Inner(1), Outer(0))], 0)
            .validate()
            .is_ok());
        assert!(op(
            3,
            3,
            &[
                (Inner(0), Outer(1)),
                (Inner(1), Outer(0)),
                (Inner(2), Outer(2))
            ],
            0
        )
        .validate()
        .is_err());
        // a cap nested between two through-strands
        let ok = op(
            2,
            4,
            &[
                (Inner(0), Outer(0)),
                (Inner(1), Inner(2)),
                (Inner(3), Outer(1)),
            ],
            0,
        );
        assert!(ok.validate().is_ok());
        let bad = op(
            2,
            4,
            &[
                (Inner(0), Outer(0)),
                (Inner(1), Inner(3)),
                (Inner(2), Outer(1)),
            ],
            0,
        );
        assert!(bad.validate().is_err());
        let mut with_crossing = PlanarTangleSpec::identity(2);
        with_crossing.crossings.push(crate::diagram::Crossing {
            id: 0,
            ports: ["a".into(), "b".into(), "c".into(), "d".into()],
            sign: 1,
        });
        assert!(matches!(
            with_crossing.validate(),
            Err(PlanarError::HasCrossings)
        ));
    }

    #[test]
    fn size_mismatch() {
        let d = braid(1, &[], 0);
        assert!(matches!(
            apply_planar(&PlanarTangleSpec::identity(4), &d),
            Err(PlanarError::SizeMismatch {
                expected: 4,
                got: 2
            })
        ));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let d = braid(2, &[1, -1, 1], 0);
        // close the right strand, then close what is left
        let first = op(
            2,
            4,
            &[
                (Inner(0), Outer(0)),
                (Inner(1), Inner(2)),
                (Inner(3), Outer(1)),
            ],
            0,
        );
        let second = PlanarTangleSpec::closure();
        let seq = apply_planar(&second, &apply_planar(&first, &d).unwrap().diagram).unwrap();
        let comp = apply_planar(&first.then(&second).unwrap(), &d).unwrap();
        let a = Tangle::new(seq.diagram).unwrap().structure();
        let b = Tangle::new(comp.diagram).unwrap().structure();
        assert_eq!(a, b);
    }
}
