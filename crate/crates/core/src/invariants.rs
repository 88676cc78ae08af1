//! Graded Euler characteristics and Betti polynomials.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use crate::algebra::{Field, LaurentPoly};
use crate::complex::ChainComplex;
use crate::diagram::{validate, DiagramError, Label, TangleDiagram};
use crate::homology::BigradedHomology;

/// `Σ_p (-1)^p Σ_q rank(p, q) q^q`.
pub fn jones_from_homology<F: Field>(h: &BigradedHomology<F>) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for e in h.ranks() {
        let sign = if e.p.rem_euclid(2) == 0 { 1 } else { -1 };
        out.add_term(e.q, sign * e.rank as i64);
    }
    out
}

/// `Σ_q rank(p, q) q^q`.
pub fn betti_polynomial<F: Field>(h: &BigradedHomology<F>, p: i64) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for b in h.blocks_in_degree(p) {
        out.add_term(b.q, b.rank() as i64);
    }
    out
}

/// Euler characteristic of the chain groups themselves.
pub fn chain_euler<F: Field>(c: &ChainComplex<F>) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for p in c.degrees() {
        let sign = if p.rem_euclid(2) == 0 { 1 } else { -1 };
        for q in c.phis(p) {
            out.add_term(q, sign);
        }
    }
    out
}

/// Graded Euler characteristic summed over smoothings, straight from the
/// labelled diagram:
/// `Σ_s (-1)^(ℓ-n₋) q^(ℓ+n₊-2n₋) (q+q⁻¹)^r q^(-t)`.
pub fn state_sum(d: &TangleDiagram) -> Result<LaurentPoly, DiagramError> {
    let report = validate(d);
    if !report.is_ok() {
        return Err(DiagramError::Invalid(report));
    }
    let mut labels: Vec<&Label> = d.boundary.iter().collect();
    let mut crossings: Vec<_> = d.crossings.iter().collect();
    crossings.sort_by_key(|c| c.id);
    labels.extend(crossings.iter().flat_map(|c| c.ports.iter()));
    let index: HashMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let edges: Vec<(usize, usize)> = d
        .connections
        .iter()
        .map(|(a, b)| (index[a], index[b]))
        .collect();
    let ports: Vec<[usize; 4]> = crossings
        .iter()
        .map(|c| std::array::from_fn(|k| index[&c.ports[k]]))
        .collect();

    let n = crossings.len();
    let n_minus = d.n_minus() as i64;
    let n_plus = d.n_plus() as i64;
    let t = d.boundary.len() / 2;
    let circle = LaurentPoly::circle();

    let total = (0..1u64 << n)
        .into_par_iter()
        .map(|s| {
            let mut uf = UnionFind::<usize>::new(labels.len());
            for &(a, b) in &edges {
                uf.union(a, b);
            }
            for (c, p) in ports.iter().enumerate() {
                if s >> c & 1 == 0 {
                    uf.union(p[0], p[1]);
                    uf.union(p[2], p[3]);
                } else {
                    uf.union(p[0], p[3]);
                    uf.union(p[1], p[2]);
                }
            }
            let mut roots = uf.into_labeling();
            roots.sort_unstable();
            roots.dedup();
            let r = roots.len() - t + d.free_circles;
            let l = s.count_ones() as i64;
            let sign = if (l - n_minus).rem_euclid(2) == 0 {
                1
            } else {
                -1
            };
            circle.pow(r as u32) * LaurentPoly::monomial(l + n_plus - 2 * n_minus - t as i64, sign)
        })
        .reduce(LaurentPoly::zero, |a, b| a + b);
    Ok(total)
}
