//! Bigraded homology with representative cocycles.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Field, FieldSpec, Generator};
use crate::complex::ChainComplex;
use crate::linalg::{kernel, Echelon, SparseMatrix, SparseVec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("differential out of degree {degree} is not homogeneous at column {column}")]
    NotHomogeneous { degree: i64, column: usize },
    #[error("vector in degree ({p}, {q}) is not a cocycle")]
    NotACocycle { p: i64, q: i64 },
}

/// One `(p, q)` summand.
#[derive(Clone, Debug)]
pub struct HomologyBlock<E> {
    pub p: i64,
    pub q: i64,
    /// Degree-`p` basis indices with quantum grading `q`, ascending.
    pub basis: Vec<usize>,
    /// Image of the incoming differential followed by the representatives,
    /// all in local coordinates. Vectors from `image_len` on are cocycle
    /// representatives.
    reduced: Echelon<E>,
    image_len: usize,
}

impl<E: Clone + PartialEq> HomologyBlock<E> {
    pub fn rank(&self) -> usize {
        self.reduced.len() - self.image_len
    }

    pub fn image_rank(&self) -> usize {
        self.image_len
    }

    fn local(&self, index: usize) -> Option<usize> {
        self.basis.binary_search(&index).ok()
    }

    /// Representative cocycles in degree-`p` coordinates.
    pub fn representatives(&self) -> Vec<SparseVec<E>> {
        self.reduced.vectors()[self.image_len..]
            .iter()
            .map(|v| v.iter().map(|(i, c)| (self.basis[*i], c.clone())).collect())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct BigradedHomology<F: Field> {
    field: F,
    pub n_plus: usize,
    pub n_minus: usize,
    blocks: BTreeMap<(i64, i64), HomologyBlock<F::Elem>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    pub p: i64,
    pub q: i64,
    pub rank: usize,
}

fn restrict<E: Clone + PartialEq>(
    d: &SparseMatrix<E>,
    cols: &[usize],
    rows: &[usize],
    degree: i64,
) -> Result<SparseMatrix<E>, HomologyError> {
    let mut out = Vec::with_capacity(cols.len());
    for &c in cols {
        let mut col = Vec::with_capacity(d.cols[c].len());
        for (r, e) in &d.cols[c] {
            let local = rows
                .binary_search(r)
                .map_err(|_| HomologyError::NotHomogeneous { degree, column: c })?;
            col.push((local, e.clone()));
        }
        col.sort_by_key(|(r, _)| *r);
        out.push(col);
    }
    Ok(SparseMatrix {
        nrows: rows.len(),
        cols: out,
    })
}

impl<F: Field> BigradedHomology<F> {
    pub fn compute(c: &ChainComplex<F>) -> Result<Self, HomologyError> {
        let field = c.field().clone();
        let mut by_q: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        for p in c.degrees() {
            for (i, q) in c.phis(p).into_iter().enumerate() {
                by_q.entry((p, q)).or_default().push(i);
            }
        }
        let empty = Vec::new();
        let jobs: Vec<(i64, i64)> = by_q.keys().copied().collect();
        let blocks: Result<Vec<HomologyBlock<F::Elem>>, HomologyError> = jobs
            .par_iter()
            .map(|&(p, q)| {
                let basis = by_q[&(p, q)].clone();
                let mut reduced = Echelon::new();
                if let Some(d_in) = c.differential(p - 1) {
                    let before = by_q.get(&(p - 1, q)).unwrap_or(&empty);
                    let incoming = restrict(d_in, before, &basis, p - 1)?;
                    for col in &incoming.cols {
                        reduced.insert(&field, col);
                    }
                }
                let image_len = reduced.len();
                let cycles = match c.differential(p) {
                    Some(d_out) => {
                        let after = by_q.get(&(p + 1, q)).unwrap_or(&empty);
                        kernel(&field, &restrict(d_out, &basis, after, p)?).0
                    }
                    None => (0..basis.len()).map(|i| vec![(i, field.one())]).collect(),
                };
                for z in cycles {
                    reduced.insert(&field, &z);
                }
                Ok(HomologyBlock {
                    p,
                    q,
                    basis,
                    reduced,
                    image_len,
                })
            })
            .collect();
        let blocks = blocks?.into_iter().map(|b| ((b.p, b.q), b)).collect();
        Ok(BigradedHomology {
            field,
            n_plus: c.n_plus(),
            n_minus: c.n_minus(),
            blocks,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn field_spec(&self) -> FieldSpec {
        self.field.spec()
    }

    pub fn rank(&self, p: i64, q: i64) -> usize {
        self.blocks.get(&(p, q)).map_or(0, HomologyBlock::rank)
    }

    /// Nonzero ranks ordered by `(p, q)`.
    pub fn ranks(&self) -> Vec<RankEntry> {
        self.blocks
            .values()
            .filter(|b| b.rank() > 0)
            .map(|b| RankEntry {
                p: b.p,
                q: b.q,
                rank: b.rank(),
            })
            .collect()
    }

    pub fn total_rank(&self, p: i64) -> usize {
        self.blocks
            .values()
            .filter(|b| b.p == p)
            .map(HomologyBlock::rank)
            .sum()
    }

    pub fn block(&self, p: i64, q: i64) -> Option<&HomologyBlock<F::Elem>> {
        self.blocks.get(&(p, q))
    }

    pub fn blocks_in_degree(&self, p: i64) -> impl Iterator<Item = &HomologyBlock<F::Elem>> {
        self.blocks
            .range((p, i64::MIN)..=(p, i64::MAX))
            .map(|(_, b)| b)
            .filter(|b| b.rank() > 0)
    }

    /// Homological degrees with nonzero homology.
    pub fn support(&self) -> Vec<i64> {
        let mut ps: Vec<i64> = self.ranks().iter().map(|e| e.p).collect();
        ps.dedup();
        ps
    }

    /// Coordinates of the class of a cocycle, homogeneous of degree `(p, q)`,
    /// in the representative basis of that block.
    pub fn coordinates(
        &self,
        p: i64,
        q: i64,
        z: &SparseVec<F::Elem>,
    ) -> Result<Vec<F::Elem>, HomologyError> {
        let Some(block) = self.blocks.get(&(p, q)) else {
            return if z.is_empty() {
                Ok(Vec::new())
            } else {
                Err(HomologyError::NotACocycle { p, q })
            };
        };
        let mut local = Vec::with_capacity(z.len());
        for (i, e) in z {
            local.push((
                block.local(*i).ok_or(HomologyError::NotACocycle { p, q })?,
                e.clone(),
            ));
        }
        local.sort_by_key(|(i, _)| *i);
        let (rem, used) = block.reduced.reduce_full(&self.field, &local);
        if !rem.is_empty() {
            return Err(HomologyError::NotACocycle { p, q });
        }
        let mut out = vec![self.field.zero(); block.rank()];
        for (k, c) in used {
            if k >= block.image_len {
                out[k - block.image_len] = c;
            }
        }
        Ok(out)
    }

    /// Representatives of the `(p, q)` block as readable generator sums.
    pub fn describe(&self, c: &ChainComplex<F>, p: i64, q: i64) -> Vec<Vec<(String, Generator)>> {
        self.blocks.get(&(p, q)).map_or_else(Vec::new, |b| {
            b.representatives()
                .into_iter()
                .map(|v| {
                    v.into_iter()
                        .map(|(i, e)| (self.field.format(&e), c.generator(p, i)))
                        .collect()
                })
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Functor, PrimeField, Rationals};
    use crate::diagram::builders::{add_kink, braid};
    use crate::diagram::TangleDiagram;

    fn homology<F: Field>(d: &TangleDiagram, f: F) -> (ChainComplex<F>, BigradedHomology<F>) {
        let c = ChainComplex::build(d, Functor::Tangle, f).unwrap();
        let h = BigradedHomology::compute(&c).unwrap();
        (c, h)
    }

    #[test]
    fn kinks_and_arc() {
        let arc = braid(1, &[], 0);
        for (d, gen) in [
            (add_kink(&arc, 0, -1), "w⊗v+"),
            (add_kink(&arc, 0, 1), "w⊗v-"),
            (arc.clone(), "w"),
        ] {
            let (c, h) = homology(&d, Rationals);
            assert_eq!(
                h.ranks(),
                vec![RankEntry {
                    p: 0,
                    q: -1,
                    rank: 1
                }]
            );
            let reps = h.describe(&c, 0, -1);
            assert_eq!(reps.len(), 1);
            assert_eq!(reps[0].len(), 1);
            assert_eq!(reps[0][0].1.to_string(), gen);
        }
    }

    #[test]
    fn trefoil_over_rationals_and_f2() {
        let d = braid(2, &[1, 1, 1], 2);
        let (_, h) = homology(&d, Rationals);
        let got: Vec<(i64, i64, usize)> = h.ranks().iter().map(|e| (e.p, e.q, e.rank)).collect();
        assert_eq!(got, vec![(0, 1, 1), (0, 3, 1), (2, 5, 1), (3, 9, 1)]);
        let (_, h2) = homology(&d, PrimeField::new(2).unwrap());
        let got: Vec<(i64, i64, usize)> = h2.ranks().iter().map(|e| (e.p, e.q, e.rank)).collect();
        assert_eq!(
            got,
            vec![
                (0, 1, 1),
                (0, 3, 1),
                (2, 5, 1),
                (2, 7, 1),
                (3, 7, 1),
                (3, 9, 1)
            ]
        );
    }

    #[test]
    fn coordinates_of_representatives() {
        let d = braid(2, &[1, 1], 2);
        let (_, h) = homology(&d, Rationals);
        for e in h.ranks() {
            let reps = h.block(e.p, e.q).unwrap().representatives();
            for (k, z) in reps.iter().enumerate() {
                let coords = h.coordinates(e.p, e.q, z).unwrap();
                for (j, c) in coords.iter().enumerate() {
                    assert_eq!(Rationals.is_one(c), j == k);
                }
            }
        }
    }

    #[test]
    fn non_cocycle_is_rejected() {
        let d = add_kink(&braid(1, &[], 0), 0, -1);
        let (_, h) = homology(&d, Rationals);
        assert_eq!(
            h.coordinates(-1, -3, &vec![(0, Rationals.one())]),
            Err(HomologyError::NotACocycle { p: -1, q: -3 })
        );
    }
}
