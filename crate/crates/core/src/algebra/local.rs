//! Tensor generators and the local saddle maps.
//!
//! Circles carry the two-dimensional module spanned by `v+` and `v-`; arcs
//! carry the one-dimensional module spanned by `w`. Active factors are always
//! listed in canonical component order, and canonical order puts arcs before
//! circles, so a mixed pair is always `(arc, circle)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::ComponentKind;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("the link functor is undefined on the {0} saddle (arcs involved)")]
    ArcsUnderLinkFunctor(SaddleKind),
    #[error("unrecognised functor `{0}` (expected g or f)")]
    UnknownFunctor(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symbol {
    #[serde(rename = "v+")]
    Plus,
    #[serde(rename = "v-")]
    Minus,
    #[serde(rename = "w")]
    Arc,
}

impl Symbol {
    pub fn theta(self) -> i64 {
        match self {
            Symbol::Plus => 1,
            Symbol::Minus | Symbol::Arc => -1,
        }
    }

    pub fn kind(self) -> ComponentKind {
        match self {
            Symbol::Arc => ComponentKind::Arc,
            _ => ComponentKind::Circle,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Plus => "v+",
            Symbol::Minus => "v-",
            Symbol::Arc => "w",
        })
    }
}

/// Which TQFT is applied to resolutions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functor {
    /// Circles only; defined on closed diagrams.
    Link,
    /// Circles and arcs; defined on all tangles.
    #[default]
    Tangle,
}

impl FromStr for Functor {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f" | "link" => Ok(Functor::Link),
            "g" | "tangle" => Ok(Functor::Tangle),
            _ => Err(AlgebraError::UnknownFunctor(s.to_string())),
        }
    }
}

/// The five ways a single saddle can change the active components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SaddleKind {
    CircleMerge,
    CircleSplit,
    ArcArcReconnect,
    ArcSplitCircle,
    ArcCircleMerge,
}

impl SaddleKind {
    pub const ALL: [SaddleKind; 5] = [
        SaddleKind::CircleMerge,
        SaddleKind::CircleSplit,
        SaddleKind::ArcArcReconnect,
        SaddleKind::ArcSplitCircle,
        SaddleKind::ArcCircleMerge,
    ];

    /// Recognise a saddle from the kinds of its active components, each list
    /// in canonical order.
    pub fn from_kinds(source: &[ComponentKind], target: &[ComponentKind]) -> Option<Self> {
        use ComponentKind::{Arc, Circle};
        match (source, target) {
            ([Circle, Circle], [Circle]) => Some(SaddleKind::CircleMerge),
            ([Circle], [Circle, Circle]) => Some(SaddleKind::CircleSplit),
            ([Arc, Arc], [Arc, Arc]) => Some(SaddleKind::ArcArcReconnect),
            ([Arc], [Arc, Circle]) => Some(SaddleKind::ArcSplitCircle),
            ([Arc, Circle], [Arc]) => Some(SaddleKind::ArcCircleMerge),
            _ => None,
        }
    }

    pub fn source_kinds(self) -> &'static [ComponentKind] {
        use ComponentKind::{Arc, Circle};
        match self {
            SaddleKind::CircleMerge => &[Circle, Circle],
            SaddleKind::CircleSplit => &[Circle],
            SaddleKind::ArcArcReconnect => &[Arc, Arc],
            SaddleKind::ArcSplitCircle => &[Arc],
            SaddleKind::ArcCircleMerge => &[Arc, Circle],
        }
    }

    pub fn target_kinds(self) -> &'static [ComponentKind] {
        use ComponentKind::{Arc, Circle};
        match self {
            SaddleKind::CircleMerge => &[Circle],
            SaddleKind::CircleSplit => &[Circle, Circle],
            SaddleKind::ArcArcReconnect => &[Arc, Arc],
            SaddleKind::ArcSplitCircle => &[Arc, Circle],
            SaddleKind::ArcCircleMerge => &[Arc],
        }
    }

    pub fn involves_arcs(self) -> bool {
        self.source_kinds().contains(&ComponentKind::Arc)
    }
}

impl fmt::Display for SaddleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SaddleKind::CircleMerge => "circle-merge",
            SaddleKind::CircleSplit => "circle-split",
            SaddleKind::ArcArcReconnect => "arc-arc-reconnect",
            SaddleKind::ArcSplitCircle => "arc-split-circle",
            SaddleKind::ArcCircleMerge => "arc-circle-merge",
        })
    }
}

/// Image of one basis tensor of the active factors, as integer combinations
/// of target tensors.
pub fn apply_saddle(kind: SaddleKind, source: &[Symbol]) -> Vec<(i64, Vec<Symbol>)> {
    use Symbol::{Arc, Minus, Plus};
    match (kind, source) {
        (SaddleKind::CircleMerge, [Plus, Plus]) => vec![(1, vec![Plus])],
        (SaddleKind::CircleMerge, [Plus, Minus] | [Minus, Plus]) => vec![(1, vec![Minus])],
        (SaddleKind::CircleMerge, [Minus, Minus]) => vec![],
        (SaddleKind::CircleSplit, [Plus]) => vec![(1, vec![Plus, Minus]), (1, vec![Minus, Plus])],
        (SaddleKind::CircleSplit, [Minus]) => vec![(1, vec![Minus, Minus])],
        (SaddleKind::ArcArcReconnect, [Arc, Arc]) => vec![],
        (SaddleKind::ArcSplitCircle, [Arc]) => vec![(1, vec![Arc, Minus])],
        (SaddleKind::ArcCircleMerge, [Arc, Plus]) => vec![(1, vec![Arc])],
        (SaddleKind::ArcCircleMerge, [Arc, Minus]) => vec![],
        _ => panic!("{kind} applied to incompatible factors {source:?}"),
    }
}

/// All basis tensors over the given factor kinds, in lexicographic order with
/// `v+` before `v-`.
pub fn tensor_basis(kinds: &[ComponentKind]) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for kind in kinds {
        let choices: &[Symbol] = match kind {
            ComponentKind::Arc => &[Symbol::Arc],
            ComponentKind::Circle => &[Symbol::Plus, Symbol::Minus],
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&s| {
                    let mut v = prefix.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

/// Integer matrix of a local map between tensor bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMatrix {
    pub source: Vec<Vec<Symbol>>,
    pub target: Vec<Vec<Symbol>>,
    /// Row-major, `target.len()` rows by `source.len()` columns.
    pub entries: Vec<Vec<i64>>,
}

impl LocalMatrix {
    fn from_fn(
        source: Vec<Vec<Symbol>>,
        target: Vec<Vec<Symbol>>,
        f: impl Fn(&[Symbol]) -> Vec<(i64, Vec<Symbol>)>,
    ) -> Self {
        let mut entries = vec![vec![0; source.len()]; target.len()];
        for (j, src) in source.iter().enumerate() {
            for (c, img) in f(src) {
                let i = target
                    .iter()
                    .position(|t| *t == img)
                    .expect("image outside target basis");
                entries[i][j] += c;
            }
        }
        LocalMatrix {
            source,
            target,
            entries,
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.entries[row][col]
    }
}

pub fn local_map(kind: SaddleKind, functor: Functor) -> Result<LocalMatrix, AlgebraError> {
    if functor == Functor::Link && kind.involves_arcs() {
        return Err(AlgebraError::ArcsUnderLinkFunctor(kind));
    }
    Ok(LocalMatrix::from_fn(
        tensor_basis(kind.source_kinds()),
        tensor_basis(kind.target_kinds()),
        |s| apply_saddle(kind, s),
    ))
}

/// Unit `1 ↦ v+` and counit `v+ ↦ 0, v- ↦ 1`, as coefficient vectors over
/// the basis `(v+, v-)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitCounit {
    pub unit: [i64; 2],
    pub counit: [i64; 2],
}

pub fn unit_counit() -> UnitCounit {
    UnitCounit {
        unit: [1, 0],
        counit: [0, 1],
    }
}

/// A basis tensor of the module attached to one resolution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub state: u64,
    pub labels: Vec<Symbol>,
}

impl Generator {
    pub fn theta(&self) -> i64 {
        theta(&self.labels)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.labels.iter().map(Symbol::to_string).collect();
        f.write_str(&parts.join("⊗"))
    }
}

pub fn theta(labels: &[Symbol]) -> i64 {
    labels.iter().map(|s| s.theta()).sum()
}

/// Quantum grading of a homogeneous generator sitting in homological degree `p`.
pub fn phi(labels: &[Symbol], p: i64, n_plus: usize, n_minus: usize) -> i64 {
    p + n_plus as i64 - n_minus as i64 + theta(labels)
}
