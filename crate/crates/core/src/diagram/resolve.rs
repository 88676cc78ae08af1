//! Smoothing a diagram at a state and tracing the resulting components.

use serde::Serialize;

use super::{ComponentKind, DiagramError, Tangle};

/// Port joined to `slot` by the smoothing of a crossing.
///
/// The 0-smoothing joins ports 0-1 and 2-3, the 1-smoothing joins 0-3 and 1-2.
#[inline]
pub fn smoothing_partner(slot: usize, bit: bool) -> usize {
    if bit {
        3 - slot
    } else {
        slot ^ 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentRecord {
    pub kind: ComponentKind,
    /// Nodes in walk order. Empty for crossing-free circles.
    pub nodes: Vec<usize>,
    /// Boundary endpoints, first and last of the walk. Empty for circles.
    pub endpoints: Vec<usize>,
}

impl ComponentRecord {
    pub fn is_free_circle(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// The arcs and circles of one smoothing.
///
/// Components are in canonical order: arcs by smallest endpoint, then circles
/// through crossings by smallest port node, then free circles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub state: u64,
    pub components: Vec<ComponentRecord>,
    /// Number of circles.
    pub r: usize,
    /// Number of arcs.
    pub t: usize,
    #[serde(skip)]
    component_of: Vec<usize>,
}

impl Resolution {
    /// Component containing a node.
    pub fn component_of(&self, node: usize) -> usize {
        self.component_of[node]
    }

    /// Tensor position among circles, or `None` for arcs.
    pub fn circle_ordinal(&self, component: usize) -> Option<usize> {
        (component >= self.t).then(|| component - self.t)
    }

    pub fn kind(&self, component: usize) -> ComponentKind {
        self.components[component].kind
    }

    /// Component index of the `k`-th crossing-free circle.
    pub fn free_circle(&self, k: usize) -> usize {
        self.components.len() - self.free_count() + k
    }

    pub fn free_count(&self) -> usize {
        self.components
            .iter()
            .rev()
            .take_while(|c| c.is_free_circle())
            .count()
    }
}

impl Tangle {
    /// Resolve at a state given as a bit mask, bit `c` for the `c`-th crossing
    /// in ascending id order.
    pub fn resolve(&self, state: u64) -> Resolution {
        let nodes = self.node_count();
        let mut component_of = vec![usize::MAX; nodes];
        let mut components = Vec::new();
        let bit = |c: usize| state >> c & 1 == 1;
        let smooth = |node: usize| {
            let (c, slot) = self.port_of(node).expect("port node");
            self.port_node(c, smoothing_partner(slot, bit(c)))
        };

        for start in 0..self.boundary_len() {
            if component_of[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut walk = vec![start];
            component_of[start] = id;
            let mut node = self.partner(start);
            loop {
                walk.push(node);
                component_of[node] = id;
                if self.is_boundary(node) {
                    break;
                }
                let next = smooth(node);
                walk.push(next);
                component_of[next] = id;
                node = self.partner(next);
            }
            let endpoints = vec![start, *walk.last().unwrap()];
            components.push(ComponentRecord {
                kind: ComponentKind::Arc,
                nodes: walk,
                endpoints,
            });
        }
        let t = components.len();

        for start in self.boundary_len()..nodes {
            if component_of[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut walk = Vec::new();
            let mut node = start;
            loop {
                walk.push(node);
                component_of[node] = id;
                let across = self.partner(node);
                walk.push(across);
                component_of[across] = id;
                node = smooth(across);
                if node == start {
                    break;
                }
            }
            components.push(ComponentRecord {
                kind: ComponentKind::Circle,
                nodes: walk,
                endpoints: Vec::new(),
            });
        }
        for _ in 0..self.free_circles() {
            components.push(ComponentRecord {
                kind: ComponentKind::Circle,
                nodes: Vec::new(),
                endpoints: Vec::new(),
            });
        }
        Resolution {
            state,
            r: components.len() - t,
            t,
            components,
            component_of,
        }
    }

    /// Resolve at a state given one bit per crossing in ascending id order.
    pub fn resolve_bits(&self, bits: &[bool]) -> Result<Resolution, DiagramError> {
        if bits.len() != self.n() {
            return Err(DiagramError::StateLength {
                expected: self.n(),
                got: bits.len(),
            });
        }
        let state = bits
            .iter()
            .enumerate()
            .fold(0u64, |s, (i, &b)| s | (b as u64) << i);
        Ok(self.resolve(state))
    }
}
