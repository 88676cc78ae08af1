//! The cochain complex of a diagram.
//!
//! Degree `p` collects every state with `popcount(s) - n_minus = p`. Within a
//! degree, states are in ascending order and each state contributes one basis
//! element per labeling of its circles. A labeling is a bit mask where the
//! `j`-th circle in canonical order sits at bit `r - 1 - j` and a set bit
//! means `v-`, so ascending masks enumerate tensors lexicographically with
//! `v+ < v-`. Arcs always carry `w` and take no bits.

use log::debug;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{apply_saddle, AlgebraError, Field, Functor, Generator, SaddleKind, Symbol};
use crate::cube::{classify_saddle, edge_sign, CubeError, EdgeDescriptor, SaddleClassification};
use crate::diagram::{ComponentKind, DiagramError, Resolution, Tangle, TangleDiagram};
use crate::linalg::{collect_sparse, SparseMatrix, SparseVec};

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("the link functor needs a diagram without boundary ({0} endpoints given)")]
    LinkFunctorOnTangle(usize),
    #[error("a resolution with {0} circles is too large to enumerate")]
    TooManyCircles(usize),
}

/// Test hook: flip the sign of one cube edge while assembling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub flip_edge: Option<(u64, usize)>,
}

#[derive(Clone, Debug)]
pub struct ChainComplex<F: Field> {
    field: F,
    functor: Functor,
    tangle: Tangle,
    resolutions: Vec<Resolution>,
    offsets: Vec<usize>,
    /// States of each degree, ascending; index 0 is degree `-n_minus`.
    groups: Vec<Vec<u64>>,
    dims: Vec<usize>,
    /// `differentials[k]` maps degree index `k` to `k + 1`.
    differentials: Vec<SparseMatrix<F::Elem>>,
}

/// Everything needed to push labelings across one cube edge.
pub(crate) struct EdgePlan {
    kind: SaddleKind,
    sign: i64,
    /// Per active source component: circle bit, or `None` for an arc.
    src_active: Vec<Option<u32>>,
    dst_active: Vec<Option<u32>>,
    /// `(source bit, target bit)` for bystander circles.
    moves: Vec<(u32, u32)>,
    target_offset: usize,
}

fn circle_bit(res: &Resolution, component: usize) -> Option<u32> {
    res.circle_ordinal(component)
        .map(|j| (res.r - 1 - j) as u32)
}

impl EdgePlan {
    pub(crate) fn new(
        class: &SaddleClassification,
        src: &Resolution,
        dst: &Resolution,
        sign: i64,
        target_offset: usize,
    ) -> Self {
        let moves = class
            .bystanders
            .iter()
            .filter_map(|&(a, b)| Some((circle_bit(src, a)?, circle_bit(dst, b)?)))
            .collect();
        EdgePlan {
            kind: class.kind,
            sign,
            src_active: class
                .active_source
                .iter()
                .map(|&c| circle_bit(src, c))
                .collect(),
            dst_active: class
                .active_target
                .iter()
                .map(|&c| circle_bit(dst, c))
                .collect(),
            moves,
            target_offset,
        }
    }

    pub(crate) fn push_image(&self, labeling: u64, out: &mut Vec<(usize, i64)>) {
        let symbols: Vec<Symbol> = self
            .src_active
            .iter()
            .map(|b| match b {
                None => Symbol::Arc,
                Some(bit) if labeling >> bit & 1 == 1 => Symbol::Minus,
                Some(_) => Symbol::Plus,
            })
            .collect();
        let images = apply_saddle(self.kind, &symbols);
        if images.is_empty() {
            return;
        }
        let base = self
            .moves
            .iter()
            .fold(0u64, |acc, &(from, to)| acc | (labeling >> from & 1) << to);
        for (coeff, img) in images {
            let mut lab = base;
            for (sym, bit) in img.iter().zip(&self.dst_active) {
                if let (Symbol::Minus, Some(b)) = (sym, bit) {
                    lab |= 1 << b;
                }
            }
            out.push((self.target_offset + lab as usize, coeff * self.sign));
        }
    }
}

impl<F: Field> ChainComplex<F> {
    pub fn build(
        diagram: &TangleDiagram,
        functor: Functor,
        field: F,
    ) -> Result<Self, ComplexError> {
        Self::build_with(diagram, functor, field, BuildOptions::default())
    }

    pub fn build_with(
        diagram: &TangleDiagram,
        functor: Functor,
        field: F,
        options: BuildOptions,
    ) -> Result<Self, ComplexError> {
        let tangle = Tangle::new(diagram.clone())?;
        Self::from_tangle(tangle, functor, field, options)
    }

    pub fn from_tangle(
        tangle: Tangle,
        functor: Functor,
        field: F,
        options: BuildOptions,
    ) -> Result<Self, ComplexError> {
        if functor == Functor::Link && tangle.boundary_len() > 0 {
            return Err(ComplexError::LinkFunctorOnTangle(tangle.boundary_len()));
        }
        let n = tangle.n();
        let states = 1u64 << n;
        let resolutions: Vec<Resolution> = (0..states)
            .into_par_iter()
            .map(|s| tangle.resolve(s))
            .collect();
        if let Some(big) = resolutions.iter().map(|r| r.r).find(|&r| r > 40) {
            return Err(ComplexError::TooManyCircles(big));
        }
        let mut groups = vec![Vec::new(); n + 1];
        for s in 0..states {
            groups[s.count_ones() as usize].push(s);
        }
        let mut offsets = vec![0usize; states as usize];
        let mut dims = Vec::with_capacity(n + 1);
        for g in &groups {
            let mut acc = 0;
            for &s in g {
                offsets[s as usize] = acc;
                acc += 1usize << resolutions[s as usize].r;
            }
            dims.push(acc);
        }

        let mut differentials = Vec::with_capacity(n);
        for k in 0..n {
            let cols: Result<Vec<Vec<SparseVec<F::Elem>>>, ComplexError> = groups[k]
                .par_iter()
                .map(|&s| {
                    let src = &resolutions[s as usize];
                    let mut plans = Vec::new();
                    for i in (0..n).filter(|&i| s >> i & 1 == 0) {
                        let e = EdgeDescriptor::new(s, i, n);
                        let dst = &resolutions[e.target() as usize];
                        let class = classify_saddle(&tangle, src, dst, &e)?;
                        if functor == Functor::Link && class.kind.involves_arcs() {
                            return Err(AlgebraError::ArcsUnderLinkFunctor(class.kind).into());
                        }
                        let mut sign = edge_sign(&e) as i64;
                        if options.flip_edge == Some((s, i)) {
                            sign = -sign;
                        }
                        plans.push(EdgePlan::new(
                            &class,
                            src,
                            dst,
                            sign,
                            offsets[e.target() as usize],
                        ));
                    }
                    let mut cols = Vec::with_capacity(1 << src.r);
                    let mut scratch = Vec::new();
                    for lab in 0..1u64 << src.r {
                        scratch.clear();
                        for plan in &plans {
                            plan.push_image(lab, &mut scratch);
                        }
                        cols.push(collect_sparse(
                            &field,
                            scratch.iter().map(|&(row, c)| (row, field.from_i64(c))),
                        ));
                    }
                    Ok(cols)
                })
                .collect();
            let cols: Vec<SparseVec<F::Elem>> = cols?.into_iter().flatten().collect();
            differentials.push(SparseMatrix {
                nrows: dims[k + 1],
                cols,
            });
        }
        debug!(
            "built complex: {} crossings, dims {:?}, {} nonzeros",
            n,
            dims,
            differentials.iter().map(SparseMatrix::nnz).sum::<usize>()
        );
        Ok(ChainComplex {
            field,
            functor,
            tangle,
            resolutions,
            offsets,
            groups,
            dims,
            differentials,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn functor(&self) -> Functor {
        self.functor
    }

    pub fn tangle(&self) -> &Tangle {
        &self.tangle
    }

    pub fn n_plus(&self) -> usize {
        self.tangle.n_plus()
    }

    pub fn n_minus(&self) -> usize {
        self.tangle.n_minus()
    }

    pub fn min_degree(&self) -> i64 {
        -(self.n_minus() as i64)
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree() + self.groups.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.min_degree()..=self.max_degree()
    }

    fn slot(&self, p: i64) -> Option<usize> {
        let k = p - self.min_degree();
        (0..self.groups.len() as i64)
            .contains(&k)
            .then_some(k as usize)
    }

    pub fn dim(&self, p: i64) -> usize {
        self.slot(p).map_or(0, |k| self.dims[k])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// The differential out of degree `p`, or `None` past the top degree.
    pub fn differential(&self, p: i64) -> Option<&SparseMatrix<F::Elem>> {
        self.slot(p).and_then(|k| self.differentials.get(k))
    }

    pub fn states(&self, p: i64) -> &[u64] {
        self.slot(p).map_or(&[], |k| &self.groups[k])
    }

    pub fn resolution(&self, state: u64) -> &Resolution {
        &self.resolutions[state as usize]
    }

    pub fn degree_of_state(&self, state: u64) -> i64 {
        state.count_ones() as i64 + self.min_degree()
    }

    /// Index of `(state, labeling)` within its degree.
    pub fn index_of(&self, state: u64, labeling: u64) -> usize {
        self.offsets[state as usize] + labeling as usize
    }

    /// `(state, labeling)` of a basis index in degree `p`.
    pub fn locate(&self, p: i64, index: usize) -> (u64, u64) {
        let states = self.states(p);
        let k = states.partition_point(|&s| self.offsets[s as usize] <= index) - 1;
        let s = states[k];
        (s, (index - self.offsets[s as usize]) as u64)
    }

    pub fn labels(&self, state: u64, labeling: u64) -> Vec<Symbol> {
        let res = self.resolution(state);
        (0..res.components.len())
            .map(|c| match circle_bit(res, c) {
                None => Symbol::Arc,
                Some(b) if labeling >> b & 1 == 1 => Symbol::Minus,
                Some(_) => Symbol::Plus,
            })
            .collect()
    }

    pub fn generator(&self, p: i64, index: usize) -> Generator {
        let (state, labeling) = self.locate(p, index);
        Generator {
            state,
            labels: self.labels(state, labeling),
        }
    }

    /// Labeling bit mask of a symbol list on the resolution at `state`.
    pub fn labeling_of(&self, state: u64, labels: &[Symbol]) -> u64 {
        let res = self.resolution(state);
        labels
            .iter()
            .enumerate()
            .fold(0, |acc, (c, sym)| match (sym, circle_bit(res, c)) {
                (Symbol::Minus, Some(b)) => acc | 1 << b,
                _ => acc,
            })
    }

    pub fn theta_of(&self, state: u64, labeling: u64) -> i64 {
        let res = self.resolution(state);
        res.r as i64 - 2 * labeling.count_ones() as i64 - res.t as i64
    }

    /// Quantum grading of a basis element of degree `p`.
    pub fn phi(&self, p: i64, index: usize) -> i64 {
        let (state, labeling) = self.locate(p, index);
        p + self.n_plus() as i64 - self.n_minus() as i64 + self.theta_of(state, labeling)
    }

    /// Quantum gradings of all basis elements of degree `p`, in basis order.
    pub fn phis(&self, p: i64) -> Vec<i64> {
        let shift = p + self.n_plus() as i64 - self.n_minus() as i64;
        let mut out = Vec::with_capacity(self.dim(p));
        for &s in self.states(p) {
            for lab in 0..1u64 << self.resolution(s).r {
                out.push(shift + self.theta_of(s, lab));
            }
        }
        out
    }

    pub fn component_kinds(&self, state: u64) -> Vec<ComponentKind> {
        self.resolution(state)
            .components
            .iter()
            .map(|c| c.kind)
            .collect()
    }
}

/// Where `d∘d` or a grading check first fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnFailure {
    pub degree: i64,
    pub column: usize,
}

impl<F: Field> ChainComplex<F> {
    /// Check that every composite `d^{p+1} d^p` vanishes.
    pub fn verify_d_squared(&self) -> Result<(), ColumnFailure> {
        for (k, pair) in self.differentials.windows(2).enumerate() {
            let product = pair[1].mul(&self.field, &pair[0]);
            if let Some(column) = product.cols.iter().position(|c| !c.is_empty()) {
                return Err(ColumnFailure {
                    degree: self.min_degree() + k as i64,
                    column,
                });
            }
        }
        Ok(())
    }

    /// Check that each column of each differential lands in a single quantum
    /// degree equal to its source's, and only on states one bit above.
    pub fn verify_homogeneous(&self) -> Result<(), ColumnFailure> {
        for (k, d) in self.differentials.iter().enumerate() {
            let p = self.min_degree() + k as i64;
            let (src_phi, dst_phi) = (self.phis(p), self.phis(p + 1));
            for (column, col) in d.cols.iter().enumerate() {
                let (s, _) = self.locate(p, column);
                let bad = col.iter().any(|(row, _)| {
                    let (t, _) = self.locate(p + 1, *row);
                    dst_phi[*row] != src_phi[column] || (s ^ t).count_ones() != 1 || t & s != s
                });
                if bad {
                    return Err(ColumnFailure { degree: p, column });
                }
            }
        }
        Ok(())
    }
}
