//! Sparse and dense exact linear algebra over a [`Field`].

use std::collections::{BTreeMap, HashMap};

use crate::algebra::Field;

/// Sparse vector as `(index, value)` pairs, sorted by index, no zeros.
pub type SparseVec<E> = Vec<(usize, E)>;

/// `y + a * x`.
pub fn axpy<F: Field>(
    field: &F,
    y: &SparseVec<F::Elem>,
    a: &F::Elem,
    x: &SparseVec<F::Elem>,
) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        if j == x.len() || (i < y.len() && y[i].0 < x[j].0) {
            out.push(y[i].clone());
            i += 1;
        } else if i == y.len() || x[j].0 < y[i].0 {
            out.push((x[j].0, field.mul(a, &x[j].1)));
            j += 1;
        } else {
            let v = field.add(&y[i].1, &field.mul(a, &x[j].1));
            if !field.is_zero(&v) {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale<F: Field>(field: &F, a: &F::Elem, x: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
    if field.is_zero(a) {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, field.mul(a, v))).collect()
}

/// Build a sparse vector from unsorted entries, summing duplicates.
pub fn collect_sparse<F: Field>(
    field: &F,
    entries: impl IntoIterator<Item = (usize, F::Elem)>,
) -> SparseVec<F::Elem> {
    let mut acc: BTreeMap<usize, F::Elem> = BTreeMap::new();
    for (i, v) in entries {
        match acc.get_mut(&i) {
            Some(e) => *e = field.add(e, &v),
            None => {
                acc.insert(i, v);
            }
        }
    }
    acc.into_iter().filter(|(_, v)| !field.is_zero(v)).collect()
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<E> {
    pub nrows: usize,
    pub cols: Vec<SparseVec<E>>,
}

impl<E: Clone + PartialEq> SparseMatrix<E> {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Value at `(row, col)`, or `None` when the entry is zero.
    pub fn get(&self, row: usize, col: usize) -> Option<&E> {
        let c = &self.cols[col];
        c.binary_search_by_key(&row, |(i, _)| *i)
            .ok()
            .map(|k| &c[k].1)
    }
}

impl<E: Clone + PartialEq> SparseMatrix<E> {
    pub fn identity<F: Field<Elem = E>>(field: &F, n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            cols: (0..n).map(|i| vec![(i, field.one())]).collect(),
        }
    }

    pub fn apply<F: Field<Elem = E>>(&self, field: &F, v: &SparseVec<E>) -> SparseVec<E> {
        let mut acc: SparseVec<E> = Vec::new();
        for (j, a) in v {
            acc = axpy(field, &acc, a, &self.cols[*j]);
        }
        acc
    }

    /// `self * rhs`.
    pub fn mul<F: Field<Elem = E>>(&self, field: &F, rhs: &SparseMatrix<E>) -> SparseMatrix<E> {
        assert_eq!(self.ncols(), rhs.nrows, "dimension mismatch");
        SparseMatrix {
            nrows: self.nrows,
            cols: rhs.cols.iter().map(|c| self.apply(field, c)).collect(),
        }
    }

    pub fn to_dense<F: Field<Elem = E>>(&self, field: &F) -> DenseMatrix<E> {
        let mut rows = vec![vec![field.zero(); self.ncols()]; self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                rows[*i][j] = v.clone();
            }
        }
        DenseMatrix {
            rows,
            ncols: self.ncols(),
        }
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<E> {
    pub rows: Vec<Vec<E>>,
    pub ncols: usize,
}

impl<E: Clone + PartialEq> DenseMatrix<E> {
    pub fn zero<F: Field<Elem = E>>(field: &F, nrows: usize, ncols: usize) -> Self {
        DenseMatrix {
            rows: vec![vec![field.zero(); ncols]; nrows],
            ncols,
        }
    }

    pub fn identity<F: Field<Elem = E>>(field: &F, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.rows[i][i] = field.one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn mul<F: Field<Elem = E>>(&self, field: &F, rhs: &DenseMatrix<E>) -> DenseMatrix<E> {
        assert_eq!(self.ncols, rhs.nrows(), "dimension mismatch");
        let mut out = Self::zero(field, self.nrows(), rhs.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if field.is_zero(a) {
                    continue;
                }
                for j in 0..rhs.ncols {
                    let b = &rhs.rows[k][j];
                    if !field.is_zero(b) {
                        out.rows[i][j] = field.add(&out.rows[i][j], &field.mul(a, b));
                    }
                }
            }
        }
        out
    }

    /// Keep only the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> DenseMatrix<E> {
        DenseMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| cols.iter().map(|&j| r[j].clone()).collect())
                .collect(),
            ncols: cols.len(),
        }
    }

    pub fn rank<F: Field<Elem = E>>(&self, field: &F) -> usize {
        rank_dense(field, self.rows.clone())
    }
}

/// Rank by Gaussian elimination on a dense row-major matrix.
pub fn rank_dense<F: Field>(field: &F, mut rows: Vec<Vec<F::Elem>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !field.is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = field.inv(&rows[rank][col]);
        for r in 0..rows.len() {
            if r == rank || field.is_zero(&rows[r][col]) {
                continue;
            }
            let factor = field.mul(&rows[r][col], &inv);
            for c in col..ncols {
                let delta = field.mul(&factor, &rows[rank][c]);
                rows[r][c] = field.sub(&rows[r][c], &delta);
            }
        }
        rank += 1;
    }
    rank
}

/// A set of sparse vectors in echelon form: each vector's largest index is
/// its pivot, pivots are distinct and every stored vector is normalised to
/// have coefficient one at its pivot.
#[derive(Clone, Debug)]
pub struct Echelon<E> {
    vectors: Vec<SparseVec<E>>,
    pivots: HashMap<usize, usize>,
}

impl<E: Clone + PartialEq> Default for Echelon<E> {
    fn default() -> Self {
        Echelon {
            vectors: Vec::new(),
            pivots: HashMap::new(),
        }
    }
}

impl<E: Clone + PartialEq> Echelon<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[SparseVec<E>] {
        &self.vectors
    }

    pub fn pivot_owner(&self, index: usize) -> Option<usize> {
        self.pivots.get(&index).copied()
    }

    /// Eliminate every entry of `v` sitting at a pivot, from the top index
    /// down. Returns the remainder and the multiples of stored vectors that
    /// were subtracted, so that `v = remainder + sum(c_k * vectors[k])`.
    pub fn reduce_full<F: Field<Elem = E>>(
        &self,
        field: &F,
        v: &SparseVec<E>,
    ) -> (SparseVec<E>, Vec<(usize, E)>) {
        let mut acc: BTreeMap<usize, E> = v.iter().cloned().collect();
        let mut remainder = Vec::new();
        let mut used = Vec::new();
        let mut bound = usize::MAX;
        while let Some((&i, a)) = acc.range(..bound).next_back() {
            let a = a.clone();
            match self.pivots.get(&i) {
                Some(&k) => {
                    for (idx, b) in &self.vectors[k] {
                        let delta = field.mul(&a, b);
                        let slot = acc.entry(*idx).or_insert_with(|| field.zero());
                        *slot = field.sub(slot, &delta);
                        if field.is_zero(slot) {
                            acc.remove(idx);
                        }
                    }
                    used.push((k, a));
                }
                None => {
                    remainder.push((i, a));
                    bound = i;
                }
            }
        }
        remainder.reverse();
        (remainder, used)
    }

    /// Reduce and, if something survives, store it. Returns the new vector's
    /// position when it was independent of the stored ones.
    pub fn insert<F: Field<Elem = E>>(&mut self, field: &F, v: &SparseVec<E>) -> Option<usize> {
        let (rem, _) = self.reduce_full(field, v);
        self.push_reduced(field, rem)
    }

    /// Store a vector that is already reduced against this echelon.
    pub fn push_reduced<F: Field<Elem = E>>(
        &mut self,
        field: &F,
        rem: SparseVec<E>,
    ) -> Option<usize> {
        let (pivot, lead) = rem.last()?.clone();
        let inv = field.inv(&lead);
        let normalised = scale(field, &inv, &rem);
        let k = self.vectors.len();
        self.vectors.push(normalised);
        self.pivots.insert(pivot, k);
        Some(k)
    }
}

/// Basis of the kernel of a sparse matrix by column reduction with a
/// tracking matrix. Also returns the rank.
pub fn kernel<F: Field>(field: &F, m: &SparseMatrix<F::Elem>) -> (Vec<SparseVec<F::Elem>>, usize) {
    // (reduced column, combination of original columns producing it)
    let mut reduced: Vec<[SparseVec<F::Elem>; 2]> = Vec::new();
    let mut pivots: HashMap<usize, usize> = HashMap::new();
    let mut kernel = Vec::new();
    for (j, col) in m.cols.iter().enumerate() {
        let mut v = col.clone();
        let mut track: SparseVec<F::Elem> = vec![(j, field.one())];
        while let Some((p, lead)) = v.last().cloned() {
            let Some(&k) = pivots.get(&p) else { break };
            let [rv, rt] = &reduced[k];
            let factor = field.neg(&field.div(&lead, &rv.last().unwrap().1));
            v = axpy(field, &v, &factor, rv);
            track = axpy(field, &track, &factor, rt);
        }
        match v.last() {
            None => kernel.push(track),
            Some((p, _)) => {
                pivots.insert(*p, reduced.len());
                reduced.push([v, track]);
            }
        }
    }
    let rank = reduced.len();
    (kernel, rank)
}

/// Rank of a sparse matrix.
pub fn rank<F: Field>(field: &F, m: &SparseMatrix<F::Elem>) -> usize {
    let mut ech = Echelon::new();
    m.cols
        .iter()
        .filter(|c| ech.insert(field, c).is_some())
        .count()
}
