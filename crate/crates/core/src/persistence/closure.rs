//! Closure morphisms `T -> D(T)` and their chain maps Ψ.
//!
//! A spec is state independent: it says where each boundary endpoint of the
//! source goes and which crossing-free pieces become which free circles. The
//! component map at a given state follows from it, since components through
//! crossings are identified by shared ports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ChainMap;
use crate::algebra::Field;
use crate::complex::ChainComplex;
use crate::diagram::{ComponentKind, Resolution, Tangle};
use crate::linalg::SparseMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClosureError {
    #[error("source and target crossing sets differ")]
    CrossingsDiffer,
    #[error("component map lists {got} endpoint fates for a source with {expected} endpoints")]
    EndpointCount { expected: usize, got: usize },
    #[error("endpoint {0} has an invalid fate")]
    BadFate(usize),
    #[error("target wiring does not follow the component map at {0}")]
    Rewiring(String),
    #[error("free circle assignment is invalid: {0}")]
    FreeCircles(String),
    #[error("state {state:#b}: a circle would map to an arc")]
    CircleToArc { state: u64 },
    #[error("state {state:#b}: source components merge into target component {component}")]
    Merge { state: u64, component: usize },
    #[error(
        "state {state:#b}: target component {component} is neither an image nor listed as new"
    )]
    Unaccounted { state: u64, component: usize },
    #[error(
        "state {state:#b}: crossing-free arc at endpoints {endpoints:?} is closed but not listed"
    )]
    MissingClosedArc { state: u64, endpoints: [usize; 2] },
    #[error("new component {0:?} is not a crossing-free component of the target")]
    BadNew(NewComponent),
    #[error("specs do not compose: {0}")]
    NotComposable(String),
}

/// Where a source boundary endpoint goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointFate {
    /// Continues to this target boundary endpoint.
    Outer(usize),
    /// Is joined, outside the source disk, to this source endpoint.
    Joined(usize),
}

/// A crossing-free source arc closed into a target free circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClosedArc {
    pub endpoints: [usize; 2],
    pub free_circle: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentMap {
    pub endpoints: Vec<EndpointFate>,
    /// Target free circle of each source free circle.
    #[serde(default)]
    pub free_circles: Vec<usize>,
    #[serde(default)]
    pub closed_arcs: Vec<ClosedArc>,
}

/// A target component with no source preimage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NewComponent {
    /// Filled with `v+`, or with `v-` when it is an inserted arc that was
    /// closed later in a composite.
    Circle {
        free_circle: usize,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        from_arc: bool,
    },
    /// Filled with `w`.
    Arc { endpoints: [usize; 2] },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureMorphismSpec {
    pub component_map: ComponentMap,
    #[serde(default)]
    pub new: Vec<NewComponent>,
}

/// Test hook for Ψ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PsiOptions {
    /// Send closed arcs to `v+` instead of `v-`.
    pub corrupt_closure: bool,
}

/// Per-state data for Ψ: bit moves and a constant mask.
struct StateMap {
    moves: Vec<(u32, u32)>,
    fixed: u64,
}

fn circle_bit(res: &Resolution, component: usize) -> Option<u32> {
    res.circle_ordinal(component)
        .map(|j| (res.r - 1 - j) as u32)
}

impl ClosureMorphismSpec {
    pub fn identity(boundary_len: usize, free_circles: usize) -> Self {
        ClosureMorphismSpec {
            component_map: ComponentMap {
                endpoints: (0..boundary_len).map(EndpointFate::Outer).collect(),
                free_circles: (0..free_circles).collect(),
                closed_arcs: Vec::new(),
            },
            new: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        let m = &self.component_map;
        self.new.is_empty()
            && m.closed_arcs.is_empty()
            && m.endpoints
                .iter()
                .enumerate()
                .all(|(i, f)| *f == EndpointFate::Outer(i))
            && m.free_circles.iter().enumerate().all(|(i, f)| *f == i)
    }

    /// Sum of θ over the new components.
    pub fn q_shift(&self) -> i64 {
        self.new
            .iter()
            .map(|c| match c {
                NewComponent::Circle {
                    from_arc: false, ..
                } => 1,
                _ => -1,
            })
            .sum()
    }

    /// Sort the unordered lists so equal morphisms compare equal.
    pub fn normalized(mut self) -> Self {
        self.component_map.closed_arcs.sort();
        self.new.sort();
        self
    }

    fn check_fates(&self, src: &Tangle, dst: &Tangle) -> Result<(), ClosureError> {
        let fates = &self.component_map.endpoints;
        if fates.len() != src.boundary_len() {
            return Err(ClosureError::EndpointCount {
                expected: src.boundary_len(),
                got: fates.len(),
            });
        }
        let mut outer_used = vec![false; dst.boundary_len()];
        let mut claim = |j: usize, who: usize| -> Result<(), ClosureError> {
            match outer_used.get_mut(j) {
                Some(slot) if !*slot => {
                    *slot = true;
                    Ok(())
                }
                _ => Err(ClosureError::BadFate(who)),
            }
        };
        for (i, fate) in fates.iter().enumerate() {
            match *fate {
                EndpointFate::Outer(j) => claim(j, i)?,
                EndpointFate::Joined(k) => {
                    if k == i || fates.get(k) != Some(&EndpointFate::Joined(i)) {
                        return Err(ClosureError::BadFate(i));
                    }
                }
            }
        }
        for c in &self.new {
            if let NewComponent::Arc { endpoints: [a, b] } = *c {
                let ok = a != b && claim(a, usize::MAX).is_ok() && claim(b, usize::MAX).is_ok();
                if !ok || dst.partner(a) != b {
                    return Err(ClosureError::BadNew(*c));
                }
            }
        }
        if let Some(j) = outer_used.iter().position(|u| !u) {
            return Err(ClosureError::Rewiring(format!(
                "target endpoint {j} has no source"
            )));
        }
        Ok(())
    }

    fn check_free_circles(&self, src: &Tangle, dst: &Tangle) -> Result<(), ClosureError> {
        let m = &self.component_map;
        if m.free_circles.len() != src.free_circles() {
            return Err(ClosureError::FreeCircles(format!(
                "{} entries for {} source free circles",
                m.free_circles.len(),
                src.free_circles()
            )));
        }
        let mut hit = vec![false; dst.free_circles()];
        let targets = m
            .free_circles
            .iter()
            .copied()
            .chain(m.closed_arcs.iter().map(|c| c.free_circle))
            .chain(self.new.iter().filter_map(|c| match c {
                NewComponent::Circle { free_circle, .. } => Some(*free_circle),
                NewComponent::Arc { .. } => None,
            }));
        for f in targets {
            match hit.get_mut(f) {
                Some(h) if !*h => *h = true,
                _ => {
                    return Err(ClosureError::FreeCircles(format!(
                        "target free circle {f} used twice or out of range"
                    )))
                }
            }
        }
        if let Some(f) = hit.iter().position(|h| !h) {
            return Err(ClosureError::FreeCircles(format!(
                "target free circle {f} has no source"
            )));
        }
        Ok(())
    }

    /// Target node a source path reaches, starting at source node `y` and
    /// passing through the operator wherever it hits the source boundary.
    fn follow(&self, src: &Tangle, dst: &Tangle, mut y: usize) -> Option<usize> {
        for _ in 0..=src.boundary_len() {
            if !src.is_boundary(y) {
                return Some(y - src.boundary_len() + dst.boundary_len());
            }
            match self.component_map.endpoints[y] {
                EndpointFate::Outer(o) => return Some(o),
                EndpointFate::Joined(k) => y = src.partner(k),
            }
        }
        None
    }

    fn check_wiring(&self, src: &Tangle, dst: &Tangle) -> Result<(), ClosureError> {
        let port_shift = |n: usize| n - src.boundary_len() + dst.boundary_len();
        for x in src.boundary_len()..src.node_count() {
            let expected = self.follow(src, dst, src.partner(x));
            if expected != Some(dst.partner(port_shift(x))) {
                return Err(ClosureError::Rewiring(format!("port {}", src.label(x))));
            }
        }
        for (i, fate) in self.component_map.endpoints.iter().enumerate() {
            if let EndpointFate::Outer(o) = *fate {
                if self.follow(src, dst, src.partner(i)) != Some(dst.partner(o)) {
                    return Err(ClosureError::Rewiring(format!("source endpoint {i}")));
                }
            }
        }
        Ok(())
    }

    /// Target component of every source component at one state, checked for
    /// injectivity, kinds and coverage.
    pub fn component_images(
        &self,
        src: &Tangle,
        dst: &Tangle,
        rs: &Resolution,
        rt: &Resolution,
    ) -> Result<Vec<usize>, ClosureError> {
        let state = rs.state;
        let m = &self.component_map;
        let mut image = Vec::with_capacity(rs.components.len());
        let mut free_seen = 0;
        for comp in &rs.components {
            let target = if let Some(&port) = comp.nodes.iter().find(|&&n| !src.is_boundary(n)) {
                rt.component_of(port - src.boundary_len() + dst.boundary_len())
            } else if comp.kind == ComponentKind::Arc {
                match (
                    m.endpoints[comp.endpoints[0]],
                    m.endpoints[comp.endpoints[1]],
                ) {
                    (EndpointFate::Outer(o), _) | (_, EndpointFate::Outer(o)) => rt.component_of(o),
                    _ => {
                        let mut ends = [comp.endpoints[0], comp.endpoints[1]];
                        ends.sort_unstable();
                        let closed = m.closed_arcs.iter().find(|c| c.endpoints == ends).ok_or(
                            ClosureError::MissingClosedArc {
                                state,
                                endpoints: ends,
                            },
                        )?;
                        rt.free_circle(closed.free_circle)
                    }
                }
            } else {
                free_seen += 1;
                rt.free_circle(m.free_circles[free_seen - 1])
            };
            if comp.kind == ComponentKind::Circle && rt.kind(target) == ComponentKind::Arc {
                return Err(ClosureError::CircleToArc { state });
            }
            image.push(target);
        }
        let mut hit = vec![false; rt.components.len()];
        for &t in &image {
            if std::mem::replace(&mut hit[t], true) {
                return Err(ClosureError::Merge {
                    state,
                    component: t,
                });
            }
        }
        for c in &self.new {
            let t = match *c {
                NewComponent::Circle { free_circle, .. } => rt.free_circle(free_circle),
                NewComponent::Arc { endpoints: [a, _] } => rt.component_of(a),
            };
            if std::mem::replace(&mut hit[t], true) {
                return Err(ClosureError::BadNew(*c));
            }
        }
        if let Some(component) = hit.iter().position(|h| !h) {
            return Err(ClosureError::Unaccounted { state, component });
        }
        Ok(image)
    }

    /// Check the spec against a source and target diagram at every state.
    pub fn validate(&self, src: &Tangle, dst: &Tangle) -> Result<(), ClosureError> {
        if src.crossing_ids() != dst.crossing_ids() || src.signs() != dst.signs() {
            return Err(ClosureError::CrossingsDiffer);
        }
        self.check_fates(src, dst)?;
        self.check_free_circles(src, dst)?;
        self.check_wiring(src, dst)?;
        (0..1u64 << src.n()).into_par_iter().try_for_each(|s| {
            self.component_images(src, dst, &src.resolve(s), &dst.resolve(s))
                .map(|_| ())
        })
    }

    fn state_map(
        &self,
        src: &Tangle,
        dst: &Tangle,
        rs: &Resolution,
        rt: &Resolution,
        options: PsiOptions,
    ) -> Result<StateMap, ClosureError> {
        let image = self.component_images(src, dst, rs, rt)?;
        let mut moves = Vec::new();
        let mut fixed = 0u64;
        for (c, &t) in image.iter().enumerate() {
            match (circle_bit(rs, c), circle_bit(rt, t)) {
                (Some(a), Some(b)) => moves.push((a, b)),
                (None, Some(b)) if !options.corrupt_closure => fixed |= 1 << b,
                _ => {}
            }
        }
        for c in &self.new {
            if let NewComponent::Circle {
                free_circle,
                from_arc: true,
            } = *c
            {
                fixed |= 1 << circle_bit(rt, rt.free_circle(free_circle)).expect("free circle");
            }
        }
        Ok(StateMap { moves, fixed })
    }

    /// Spec of `next ∘ self`, where `next` starts at the target of `self`.
    pub fn compose(&self, next: &ClosureMorphismSpec) -> Result<ClosureMorphismSpec, ClosureError> {
        let (m1, m2) = (&self.component_map, &next.component_map);
        let middle = m2.endpoints.len();
        let mut preimage = vec![None; middle];
        for (i, f) in m1.endpoints.iter().enumerate() {
            if let EndpointFate::Outer(j) = *f {
                *preimage.get_mut(j).ok_or_else(|| {
                    ClosureError::NotComposable(format!(
                        "endpoint {j} is beyond the middle boundary"
                    ))
                })? = Some(i);
            }
        }
        let circle = |f: usize| {
            m2.free_circles.get(f).copied().ok_or_else(|| {
                ClosureError::NotComposable(format!("middle free circle {f} is unmapped"))
            })
        };
        let merge =
            || ClosureError::NotComposable("an inserted arc would merge with a source arc".into());

        let mut endpoints = Vec::with_capacity(m1.endpoints.len());
        for f in &m1.endpoints {
            endpoints.push(match *f {
                EndpointFate::Joined(k) => EndpointFate::Joined(k),
                EndpointFate::Outer(j) => match m2.endpoints[j] {
                    EndpointFate::Outer(o) => EndpointFate::Outer(o),
                    EndpointFate::Joined(j2) => {
                        EndpointFate::Joined(preimage[j2].ok_or_else(merge)?)
                    }
                },
            });
        }
        let free_circles = m1
            .free_circles
            .iter()
            .map(|&f| circle(f))
            .collect::<Result<Vec<_>, _>>()?;
        let mut closed_arcs = Vec::new();
        for c in &m1.closed_arcs {
            closed_arcs.push(ClosedArc {
                endpoints: c.endpoints,
                free_circle: circle(c.free_circle)?,
            });
        }
        let mut new = Vec::new();
        for c in &self.new {
            match *c {
                NewComponent::Circle {
                    free_circle,
                    from_arc,
                } => new.push(NewComponent::Circle {
                    free_circle: circle(free_circle)?,
                    from_arc,
                }),
                NewComponent::Arc { endpoints: [a, b] } => match (m2.endpoints[a], m2.endpoints[b])
                {
                    (EndpointFate::Outer(x), EndpointFate::Outer(y)) => {
                        new.push(NewComponent::Arc {
                            endpoints: [x.min(y), x.max(y)],
                        })
                    }
                    (EndpointFate::Joined(x), _) if x == b => {}
                    _ => return Err(merge()),
                },
            }
        }
        for c in &m2.closed_arcs {
            let [a, b] = c.endpoints;
            match (preimage[a], preimage[b]) {
                (Some(x), Some(y)) => closed_arcs.push(ClosedArc {
                    endpoints: [x.min(y), x.max(y)],
                    free_circle: c.free_circle,
                }),
                (None, None) if self.new.contains(&NewComponent::Arc { endpoints: [a, b] }) => new
                    .push(NewComponent::Circle {
                        free_circle: c.free_circle,
                        from_arc: true,
                    }),
                _ => return Err(merge()),
            }
        }
        new.extend(next.new.iter().copied());
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
}

/// The chain map Ψ of a closure morphism.
pub fn build_psi<F: Field>(
    src: &ChainComplex<F>,
    dst: &ChainComplex<F>,
    spec: &ClosureMorphismSpec,
) -> Result<ChainMap<F::Elem>, ClosureError> {
    build_psi_with(src, dst, spec, PsiOptions::default())
}

pub fn build_psi_with<F: Field>(
    src: &ChainComplex<F>,
    dst: &ChainComplex<F>,
    spec: &ClosureMorphismSpec,
    options: PsiOptions,
) -> Result<ChainMap<F::Elem>, ClosureError> {
    let (ts, tt) = (src.tangle(), dst.tangle());
    if ts.crossing_ids() != tt.crossing_ids() || ts.signs() != tt.signs() {
        return Err(ClosureError::CrossingsDiffer);
    }
    spec.check_fates(ts, tt)?;
    spec.check_free_circles(ts, tt)?;
    spec.check_wiring(ts, tt)?;
    let field = src.field();
    let maps = src
        .degrees()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| {
            let mut cols = Vec::with_capacity(src.dim(p));
            for &s in src.states(p) {
                let (rs, rt) = (src.resolution(s), dst.resolution(s));
                let sm = spec.state_map(ts, tt, rs, rt, options)?;
                for lab in 0..1u64 << rs.r {
                    let target = sm
                        .moves
                        .iter()
                        .fold(sm.fixed, |acc, &(a, b)| acc | (lab >> a & 1) << b);
                    cols.push(vec![(dst.index_of(s, target), field.one())]);
                }
            }
            Ok(SparseMatrix {
                nrows: dst.dim(p),
                cols,
            })
        })
        .collect::<Result<Vec<_>, ClosureError>>()?;
    Ok(ChainMap {
        min_degree: src.min_degree(),
        maps,
        q_shift: spec.q_shift(),
    })
}
