//! Chain maps between complexes, their effect on homology, and persistence
//! over filtrations of diagrams.

pub mod barcode;
pub mod closure;
pub mod cobordism;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Field;
use crate::complex::ChainComplex;
use crate::linalg::SparseMatrix;

pub use barcode::{
    induced_on_homology, Bar, Barcode, BettiEntry, DiagramRef, Filtration, FiltrationError,
    FiltrationFile, InducedMap, PersistenceModule, PersistenceReport, RankTable, Run, Step,
};
pub use closure::{
    build_psi, build_psi_with, ClosedArc, ClosureError, ClosureMorphismSpec, ComponentMap,
    EndpointFate, NewComponent, PsiOptions,
};
pub use cobordism::{cap_map, cone_projection, cup_map, saddle_map, CobordismError, SaddleSite};

/// A degree-preserving map of cochain complexes that shifts the quantum
/// grading by a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap<E> {
    pub min_degree: i64,
    /// One matrix per homological degree, ascending from `min_degree`.
    pub maps: Vec<SparseMatrix<E>>,
    pub q_shift: i64,
}

impl<E: Clone + PartialEq> ChainMap<E> {
    pub fn at(&self, p: i64) -> Option<&SparseMatrix<E>> {
        usize::try_from(p - self.min_degree)
            .ok()
            .and_then(|k| self.maps.get(k))
    }

    /// `other ∘ self`.
    pub fn then<F: Field<Elem = E>>(&self, field: &F, other: &ChainMap<E>) -> ChainMap<E> {
        debug_assert_eq!(self.min_degree, other.min_degree);
        ChainMap {
            min_degree: self.min_degree,
            maps: self
                .maps
                .iter()
                .zip(&other.maps)
                .map(|(a, b)| b.mul(field, a))
                .collect(),
            q_shift: self.q_shift + other.q_shift,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainMapDefect {
    /// Matrix sizes disagree with the complexes.
    Shape,
    /// `d f != f d` in this column.
    Commute,
    /// An entry does not shift the quantum grading by `q_shift`.
    Grading,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChainMapFailure {
    pub degree: i64,
    pub column: usize,
    pub defect: ChainMapDefect,
}

/// Check `d_dst f = f d_src` in every degree, and the quantum shift.
pub fn verify_chain_map<F: Field>(
    f: &ChainMap<F::Elem>,
    src: &ChainComplex<F>,
    dst: &ChainComplex<F>,
) -> Result<(), ChainMapFailure> {
    let field = src.field();
    let degrees: Vec<i64> = src.degrees().collect();
    let shape = |degree| ChainMapFailure {
        degree,
        column: 0,
        defect: ChainMapDefect::Shape,
    };
    if f.min_degree != src.min_degree()
        || f.maps.len() != degrees.len()
        || dst.min_degree() != src.min_degree()
    {
        return Err(shape(f.min_degree));
    }
    for &p in &degrees {
        let m = f.at(p).ok_or(shape(p))?;
        if m.ncols() != src.dim(p) || m.nrows != dst.dim(p) {
            return Err(shape(p));
        }
    }
    degrees.par_iter().try_for_each(|&p| {
        let m = f.at(p).expect("shape checked");
        let (src_phi, dst_phi) = (src.phis(p), dst.phis(p));
        for (column, col) in m.cols.iter().enumerate() {
            if col
                .iter()
                .any(|(row, _)| dst_phi[*row] != src_phi[column] + f.q_shift)
            {
                return Err(ChainMapFailure {
                    degree: p,
                    column,
                    defect: ChainMapDefect::Grading,
                });
            }
        }
        if let (Some(d_src), Some(d_dst)) = (src.differential(p), dst.differential(p)) {
            let next = f.at(p + 1).expect("shape checked");
            let lhs = d_dst.mul(field, m);
            let rhs = next.mul(field, d_src);
            if let Some(column) = (0..lhs.ncols()).find(|&j| lhs.cols[j] != rhs.cols[j]) {
                return Err(ChainMapFailure {
                    degree: p,
                    column,
                    defect: ChainMapDefect::Commute,
                });
            }
        }
        Ok(())
    })
}

/// The identity chain map of a complex.
pub fn identity_map<F: Field>(c: &ChainComplex<F>) -> ChainMap<F::Elem> {
    ChainMap {
        min_degree: c.min_degree(),
        maps: c
            .degrees()
            .map(|p| SparseMatrix::identity(c.field(), c.dim(p)))
            .collect(),
        q_shift: 0,
    }
}
