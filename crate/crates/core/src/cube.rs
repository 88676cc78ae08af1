//! The cube of smoothing states: edges, signs and saddle classification.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::SaddleKind;
use crate::diagram::{ComponentKind, Resolution, Tangle};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CubeError {
    #[error("resolutions at {from:#b} and {to:#b} are not the ends of edge {edge}")]
    NotAdjacent {
        from: u64,
        to: u64,
        edge: EdgeDescriptor,
    },
    #[error("active components {from:?} -> {to:?} match no saddle type")]
    UnknownPattern {
        from: Vec<ComponentKind>,
        to: Vec<ComponentKind>,
    },
    #[error("bystander component {0} has no identical partner after the saddle")]
    Bystander(usize),
}

/// An edge of the state cube: the crossing at `position` flips from 0 to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EdgeDescriptor {
    pub source: u64,
    pub position: usize,
    pub n: usize,
}

impl EdgeDescriptor {
    pub fn new(source: u64, position: usize, n: usize) -> Self {
        debug_assert!(source >> position & 1 == 0);
        EdgeDescriptor {
            source,
            position,
            n,
        }
    }

    pub fn target(&self) -> u64 {
        self.source | 1 << self.position
    }

    /// Homological degree of the source state.
    pub fn height(&self, n_minus: usize) -> i64 {
        self.source.count_ones() as i64 - n_minus as i64
    }

    /// The edge as a word over `{0, 1, *}`.
    pub fn xi(&self) -> Vec<Option<bool>> {
        (0..self.n)
            .map(|i| (i != self.position).then_some(self.source >> i & 1 == 1))
            .collect()
    }
}

impl fmt::Display for EdgeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.xi() {
            f.write_str(match s {
                None => "*",
                Some(false) => "0",
                Some(true) => "1",
            })?;
        }
        Ok(())
    }
}

/// All `n * 2^(n-1)` edges, ordered by source height, then source state,
/// then flipped position.
pub fn edges(t: &Tangle) -> Vec<EdgeDescriptor> {
    let n = t.n();
    let mut out: Vec<EdgeDescriptor> = (0..1u64 << n)
        .flat_map(|s| {
            (0..n)
                .filter(move |&i| s >> i & 1 == 0)
                .map(move |i| EdgeDescriptor::new(s, i, n))
        })
        .collect();
    out.sort_by_key(|e| (e.source.count_ones(), e.source, e.position));
    out
}

/// `(-1)` to the number of 1s before the flipped position.
pub fn edge_sign(e: &EdgeDescriptor) -> i8 {
    let below = e.source & ((1u64 << e.position) - 1);
    if below.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaddleClassification {
    pub kind: SaddleKind,
    /// Source components touching the flipped crossing, canonical order.
    pub active_source: Vec<usize>,
    pub active_target: Vec<usize>,
    /// `(source component, target component)` for every other component.
    pub bystanders: Vec<(usize, usize)>,
}

/// Match components that are untouched by a local change. Components with
/// nodes are matched through a shared node, free circles by position among
/// the free circles after removing the active ones.
pub(crate) fn match_bystanders(
    source: &Resolution,
    active_source: &[usize],
    target: &Resolution,
    active_target: &[usize],
    node_map: impl Fn(usize) -> usize,
) -> Result<Vec<(usize, usize)>, CubeError> {
    let mut out = Vec::with_capacity(source.components.len());
    let src_free: Vec<usize> = (0..source.components.len())
        .filter(|c| source.components[*c].is_free_circle() && !active_source.contains(c))
        .collect();
    let dst_free: Vec<usize> = (0..target.components.len())
        .filter(|c| target.components[*c].is_free_circle() && !active_target.contains(c))
        .collect();
    if src_free.len() != dst_free.len() {
        return Err(CubeError::Bystander(src_free.first().copied().unwrap_or(0)));
    }
    out.extend(src_free.into_iter().zip(dst_free));
    for (c, comp) in source.components.iter().enumerate() {
        if comp.is_free_circle() || active_source.contains(&c) {
            continue;
        }
        let d = target.component_of(node_map(comp.nodes[0]));
        let other = &target.components[d];
        if active_target.contains(&d)
            || other.kind != comp.kind
            || other.nodes.len() != comp.nodes.len()
        {
            return Err(CubeError::Bystander(c));
        }
        if comp
            .nodes
            .iter()
            .any(|&n| target.component_of(node_map(n)) != d)
        {
            return Err(CubeError::Bystander(c));
        }
        out.push((c, d));
    }
    out.sort_unstable();
    Ok(out)
}

pub fn classify_saddle(
    t: &Tangle,
    source: &Resolution,
    target: &Resolution,
    e: &EdgeDescriptor,
) -> Result<SaddleClassification, CubeError> {
    if source.state != e.source || target.state != e.target() {
        return Err(CubeError::NotAdjacent {
            from: source.state,
            to: target.state,
            edge: *e,
        });
    }
    let ports: Vec<usize> = (0..4).map(|k| t.port_node(e.position, k)).collect();
    let active = |r: &Resolution| {
        let mut a: Vec<usize> = ports.iter().map(|&p| r.component_of(p)).collect();
        a.sort_unstable();
        a.dedup();
        a
    };
    let active_source = active(source);
    let active_target = active(target);
    let kinds = |r: &Resolution, a: &[usize]| a.iter().map(|&c| r.kind(c)).collect::<Vec<_>>();
    let (ks, kt) = (kinds(source, &active_source), kinds(target, &active_target));
    let kind =
        SaddleKind::from_kinds(&ks, &kt).ok_or(CubeError::UnknownPattern { from: ks, to: kt })?;
    let bystanders = match_bystanders(source, &active_source, target, &active_target, |n| n)?;
    Ok(SaddleClassification {
        kind,
        active_source,
        active_target,
        bystanders,
    })
}
