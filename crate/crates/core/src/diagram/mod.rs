//! Combinatorial tangle diagrams.
//!
//! A diagram is a set of four-valent crossings, boundary endpoints on a disk
//! and a perfect matching ("connections") on all crossing ports and boundary
//! endpoints. Each crossing lists its ports counterclockwise with ports 0 and
//! 2 on the under-strand.
//!
//! Internally every port and endpoint becomes a node index: boundary endpoint
//! `i` is node `i`, and port `k` of the `c`-th crossing in ascending id order
//! is node `boundary_len + 4c + k`. Component order and tensor-factor order
//! are derived from these indices, so they depend only on the diagram's
//! structure and never on label spelling or crossing listing order.

pub mod builders;
pub mod planar;
pub mod resolve;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use planar::{apply_planar, PlanarError, PlanarOutput, PlanarPoint, PlanarTangleSpec};
pub use resolve::{ComponentRecord, Resolution};

/// Largest crossing count whose state fits in a `u64`.
pub const MAX_CROSSINGS: usize = 63;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(n) => write!(f, "{n}"),
            Label::Str(s) => f.write_str(s),
        }
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Str(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label::Str(s)
    }
}

impl From<i64> for Label {
    fn from(n: i64) -> Self {
        Label::Int(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub id: i64,
    pub ports: [Label; 4],
    pub sign: i8,
}

/// Raw diagram as read from or written to JSON.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangleDiagram {
    #[serde(default)]
    pub boundary: Vec<Label>,
    #[serde(default)]
    pub crossings: Vec<Crossing>,
    #[serde(default)]
    pub connections: Vec<(Label, Label)>,
    #[serde(default)]
    pub free_circles: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Arc,
    Circle,
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentKind::Arc => "arc",
            ComponentKind::Circle => "circle",
        })
    }
}

/// One broken invariant of a raw diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    OddBoundary(usize),
    DuplicateLabel(Label),
    DuplicateCrossingId(i64),
    BadSign { crossing: i64, sign: i8 },
    UnknownLabel(Label),
    SelfConnection(Label),
    NotInvolution { label: Label, pairs: usize },
    Unconnected(Label),
    TooManyCrossings(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OddBoundary(n) => write!(f, "boundary has odd length {n}"),
            Violation::DuplicateLabel(l) => write!(f, "label `{l}` is used more than once"),
            Violation::DuplicateCrossingId(id) => {
                write!(f, "crossing id {id} is used more than once")
            }
            Violation::BadSign { crossing, sign } => {
                write!(f, "crossing {crossing} has sign {sign}, expected +1 or -1")
            }
            Violation::UnknownLabel(l) => write!(f, "connection mentions unknown label `{l}`"),
            Violation::SelfConnection(l) => write!(f, "label `{l}` is connected to itself"),
            Violation::NotInvolution { label, pairs } => {
                write!(
                    f,
                    "connection not an involution: `{label}` appears in {pairs} pairs"
                )
            }
            Violation::Unconnected(l) => write!(f, "label `{l}` is not in any connection"),
            Violation::TooManyCrossings(n) => {
                write!(
                    f,
                    "{n} crossings exceed the supported maximum of {MAX_CROSSINGS}"
                )
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("pass");
        }
        let msgs: Vec<String> = self.violations.iter().map(Violation::to_string).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("invalid diagram: {0}")]
    Invalid(ValidationReport),
    #[error("state has {got} bits but the diagram has {expected} crossings")]
    StateLength { expected: usize, got: usize },
    #[error("malformed diagram JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub fn validate(d: &TangleDiagram) -> ValidationReport {
    let mut violations = Vec::new();
    if !d.boundary.len().is_multiple_of(2) {
        violations.push(Violation::OddBoundary(d.boundary.len()));
    }
    if d.crossings.len() > MAX_CROSSINGS {
        violations.push(Violation::TooManyCrossings(d.crossings.len()));
    }

    let mut ids = BTreeSet::new();
    for c in &d.crossings {
        if !ids.insert(c.id) {
            violations.push(Violation::DuplicateCrossingId(c.id));
        }
        if c.sign != 1 && c.sign != -1 {
            violations.push(Violation::BadSign {
                crossing: c.id,
                sign: c.sign,
            });
        }
    }

    let mut known: HashMap<&Label, usize> = HashMap::new();
    let all_labels = d
        .boundary
        .iter()
        .chain(d.crossings.iter().flat_map(|c| c.ports.iter()));
    for l in all_labels {
        let count = known.entry(l).or_insert(0);
        *count += 1;
        if *count == 2 {
            violations.push(Violation::DuplicateLabel(l.clone()));
        }
    }

    let mut uses: HashMap<&Label, usize> = HashMap::new();
    for (a, b) in &d.connections {
        if a == b {
            violations.push(Violation::SelfConnection(a.clone()));
        }
        for l in [a, b] {
            if !known.contains_key(l) {
                if !violations.contains(&Violation::UnknownLabel(l.clone())) {
                    violations.push(Violation::UnknownLabel(l.clone()));
                }
                continue;
            }
            *uses.entry(l).or_insert(0) += 1;
        }
    }
    let mut ordered: Vec<&Label> = known.keys().copied().collect();
    ordered.sort();
    for l in ordered {
        match uses.get(l).copied().unwrap_or(0) {
            0 => violations.push(Violation::Unconnected(l.clone())),
            1 => {}
            n => violations.push(Violation::NotInvolution {
                label: l.clone(),
                pairs: n,
            }),
        }
    }
    ValidationReport { violations }
}

impl TangleDiagram {
    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DiagramError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DiagramError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serialises")
    }

    pub fn n_plus(&self) -> usize {
        self.crossings.iter().filter(|c| c.sign > 0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.crossings.iter().filter(|c| c.sign < 0).count()
    }

    /// Same diagram with crossings sorted by id and connections in a fixed
    /// order, for label-level comparisons.
    pub fn normalized(&self) -> TangleDiagram {
        let mut d = self.clone();
        d.crossings.sort_by_key(|c| c.id);
        for pair in &mut d.connections {
            if pair.1 < pair.0 {
                std::mem::swap(&mut pair.0, &mut pair.1);
            }
        }
        d.connections.sort();
        d
    }
}

/// Where a node sits in the diagram, independent of labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKey {
    Boundary(usize),
    Port { crossing: i64, slot: u8 },
}

/// Label-free description of a validated diagram. Two diagrams with equal
/// structure have identical complexes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TangleStructure {
    pub boundary_len: usize,
    pub crossings: Vec<(i64, i8)>,
    pub partner: Vec<usize>,
    pub free_circles: usize,
}

/// A validated diagram in node-index form.
#[derive(Clone, Debug)]
pub struct Tangle {
    diagram: TangleDiagram,
    ids: Vec<i64>,
    signs: Vec<i8>,
    boundary_len: usize,
    partner: Vec<usize>,
    labels: Vec<Label>,
    free_circles: usize,
}

impl Tangle {
    pub fn new(diagram: TangleDiagram) -> Result<Self, DiagramError> {
        let report = validate(&diagram);
        if !report.is_ok() {
            return Err(DiagramError::Invalid(report));
        }
        let mut order: Vec<usize> = (0..diagram.crossings.len()).collect();
        order.sort_by_key(|&i| diagram.crossings[i].id);
        let boundary_len = diagram.boundary.len();

        let mut labels = diagram.boundary.clone();
        let mut ids = Vec::with_capacity(order.len());
        let mut signs = Vec::with_capacity(order.len());
        for &i in &order {
            let c = &diagram.crossings[i];
            ids.push(c.id);
            signs.push(c.sign);
            labels.extend(c.ports.iter().cloned());
        }
        let index: HashMap<&Label, usize> =
            labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut partner = vec![usize::MAX; labels.len()];
        for (a, b) in &diagram.connections {
            let (ia, ib) = (index[a], index[b]);
            partner[ia] = ib;
            partner[ib] = ia;
        }
        Ok(Tangle {
            free_circles: diagram.free_circles,
            diagram,
            ids,
            signs,
            boundary_len,
            partner,
            labels,
        })
    }

    pub fn diagram(&self) -> &TangleDiagram {
        &self.diagram
    }

    /// Number of crossings.
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn n_plus(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary_len
    }

    pub fn free_circles(&self) -> usize {
        self.free_circles
    }

    pub fn node_count(&self) -> usize {
        self.partner.len()
    }

    /// Crossing ids in ascending order; position `c` is state bit `c`.
    pub fn crossing_ids(&self) -> &[i64] {
        &self.ids
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn position_of(&self, id: i64) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn port_node(&self, crossing: usize, slot: usize) -> usize {
        self.boundary_len + 4 * crossing + slot
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        node < self.boundary_len
    }

    /// `(crossing position, slot)` of a port node.
    pub fn port_of(&self, node: usize) -> Option<(usize, usize)> {
        (node >= self.boundary_len).then(|| {
            (
                (node - self.boundary_len) / 4,
                (node - self.boundary_len) % 4,
            )
        })
    }

    pub fn node_key(&self, node: usize) -> NodeKey {
        match self.port_of(node) {
            None => NodeKey::Boundary(node),
            Some((c, slot)) => NodeKey::Port {
                crossing: self.ids[c],
                slot: slot as u8,
            },
        }
    }

    pub fn node_of_key(&self, key: NodeKey) -> Option<usize> {
        match key {
            NodeKey::Boundary(i) => (i < self.boundary_len).then_some(i),
            NodeKey::Port { crossing, slot } => self
                .position_of(crossing)
                .map(|c| self.port_node(c, slot as usize)),
        }
    }

    pub fn partner(&self, node: usize) -> usize {
        self.partner[node]
    }

    pub fn label(&self, node: usize) -> &Label {
        &self.labels[node]
    }

    pub fn node_of_label(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn structure(&self) -> TangleStructure {
        TangleStructure {
            boundary_len: self.boundary_len,
            crossings: self
                .ids
                .iter()
                .copied()
                .zip(self.signs.iter().copied())
                .collect(),
            partner: self.partner.clone(),
            free_circles: self.free_circles,
        }
    }
}
