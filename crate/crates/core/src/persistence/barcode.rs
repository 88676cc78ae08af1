//! Filtrations, induced maps on homology, rank tables and barcodes.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::closure::{build_psi, ClosureError, ClosureMorphismSpec};
use super::cobordism::{cap_map, cup_map, saddle_map, CobordismError, SaddleSite};
use super::{verify_chain_map, ChainMap, ChainMapFailure};
use crate::algebra::{Field, Functor, LaurentPoly};
use crate::complex::{ChainComplex, ComplexError};
use crate::diagram::{DiagramError, TangleDiagram};
use crate::homology::{BigradedHomology, HomologyError};
use crate::linalg::DenseMatrix;

#[derive(Debug, Error)]
pub enum FiltrationError {
    #[error("grades must be strictly increasing (at grade {0})")]
    Grades(usize),
    #[error("{grades} grades for {diagrams} diagrams")]
    GradeCount { grades: usize, diagrams: usize },
    #[error("{diagrams} diagrams need {} steps, found {steps}", diagrams.saturating_sub(1))]
    StepCount { diagrams: usize, steps: usize },
    #[error("diagram {index}: {source}")]
    Diagram { index: usize, source: DiagramError },
    #[error("diagram {index}: {source}")]
    Complex { index: usize, source: ComplexError },
    #[error("diagram {index}: {source}")]
    Homology { index: usize, source: HomologyError },
    #[error("step {index}: {source}")]
    Closure { index: usize, source: ClosureError },
    #[error("step {index}: {source}")]
    Cobordism {
        index: usize,
        source: CobordismError,
    },
    #[error("step {index}: not a chain map ({failure:?})")]
    NotAChainMap {
        index: usize,
        failure: ChainMapFailure,
    },
    #[error("step {index}: induced map: {source}")]
    Induced { index: usize, source: HomologyError },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
}

impl FiltrationError {
    /// Index of the offending step, when the error belongs to one.
    pub fn step(&self) -> Option<usize> {
        match self {
            FiltrationError::Closure { index, .. }
            | FiltrationError::Cobordism { index, .. }
            | FiltrationError::NotAChainMap { index, .. }
            | FiltrationError::Induced { index, .. } => Some(*index),
            _ => None,
        }
    }
}

/// One arrow of a filtration, from diagram `i` to diagram `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Closure(ClosureMorphismSpec),
    Cap,
    Cup {
        free_circle: usize,
    },
    Saddle {
        site: SaddleSite,
    },
    /// No map is available; persistence restarts after this step.
    Boundary {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiagramRef {
    Path(PathBuf),
    Inline(TangleDiagram),
}

/// The on-disk form of a filtration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationFile {
    pub grades: Vec<f64>,
    pub diagrams: Vec<DiagramRef>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    pub grades: Vec<f64>,
    pub diagrams: Vec<TangleDiagram>,
    pub steps: Vec<Step>,
}

impl Filtration {
    pub fn new(
        grades: Vec<f64>,
        diagrams: Vec<TangleDiagram>,
        steps: Vec<Step>,
    ) -> Result<Self, FiltrationError> {
        let f = Filtration {
            grades,
            diagrams,
            steps,
        };
        f.check_shape()?;
        Ok(f)
    }

    fn check_shape(&self) -> Result<(), FiltrationError> {
        if self.grades.len() != self.diagrams.len() {
            return Err(FiltrationError::GradeCount {
                grades: self.grades.len(),
                diagrams: self.diagrams.len(),
            });
        }
        if self.steps.len() + 1 != self.diagrams.len().max(1) {
            return Err(FiltrationError::StepCount {
                diagrams: self.diagrams.len(),
                steps: self.steps.len(),
            });
        }
        if let Some(i) = (1..self.grades.len()).find(|&i| {
            self.grades[i].partial_cmp(&self.grades[i - 1]) != Some(std::cmp::Ordering::Greater)
        }) {
            return Err(FiltrationError::Grades(i));
        }
        Ok(())
    }

    /// Resolve diagram references relative to `base`.
    pub fn from_file(file: FiltrationFile, base: &Path) -> Result<Self, FiltrationError> {
        let diagrams = file
            .diagrams
            .into_iter()
            .enumerate()
            .map(|(index, r)| match r {
                DiagramRef::Inline(d) => Ok(d),
                DiagramRef::Path(p) => TangleDiagram::from_path(base.join(p))
                    .map_err(|source| FiltrationError::Diagram { index, source }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Filtration::new(file.grades, diagrams, file.steps)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FiltrationError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FiltrationError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file: FiltrationFile = serde_json::from_str(&text)?;
        Filtration::from_file(file, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn to_file(&self) -> FiltrationFile {
        FiltrationFile {
            grades: self.grades.clone(),
            diagrams: self
                .diagrams
                .iter()
                .cloned()
                .map(DiagramRef::Inline)
                .collect(),
            steps: self.steps.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }

    /// Maximal index ranges joined by maps.
    pub fn runs(&self) -> Vec<Run> {
        let mut runs = Vec::new();
        let mut start = 0;
        for (i, step) in self.steps.iter().enumerate() {
            if let Step::Boundary { reason } = step {
                runs.push(Run {
                    start,
                    end: i,
                    boundary_after: Some(reason.clone()),
                });
                start = i + 1;
            }
        }
        if !self.diagrams.is_empty() {
            runs.push(Run {
                start,
                end: self.diagrams.len() - 1,
                boundary_after: None,
            });
        }
        runs
    }

    /// Build every complex, homology and induced map.
    pub fn compute<F: Field>(
        &self,
        functor: Functor,
        field: F,
    ) -> Result<PersistenceModule<F>, FiltrationError> {
        self.check_shape()?;
        let complexes = self
            .diagrams
            .par_iter()
            .enumerate()
            .map(|(index, d)| {
                ChainComplex::build(d, functor, field.clone())
                    .map_err(|source| FiltrationError::Complex { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let homology = complexes
            .par_iter()
            .enumerate()
            .map(|(index, c)| {
                BigradedHomology::compute(c)
                    .map_err(|source| FiltrationError::Homology { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let maps = self
            .steps
            .par_iter()
            .enumerate()
            .map(|(index, step)| {
                let (src, dst) = (&complexes[index], &complexes[index + 1]);
                let map = match step {
                    Step::Boundary { .. } => return Ok(None),
                    Step::Closure(spec) => build_psi(src, dst, spec)
                        .map_err(|source| FiltrationError::Closure { index, source })?,
                    Step::Cap => cap_map(src, dst)
                        .map_err(|source| FiltrationError::Cobordism { index, source })?,
                    Step::Cup { free_circle } => cup_map(src, dst, *free_circle)
                        .map_err(|source| FiltrationError::Cobordism { index, source })?,
                    Step::Saddle { site } => saddle_map(src, dst, site)
                        .map_err(|source| FiltrationError::Cobordism { index, source })?,
                };
                verify_chain_map(&map, src, dst)
                    .map_err(|failure| FiltrationError::NotAChainMap { index, failure })?;
                induced_on_homology(&map, &homology[index], &homology[index + 1])
                    .map(Some)
                    .map_err(|source| FiltrationError::Induced { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        info!("filtration of {} diagrams computed", self.len());
        Ok(PersistenceModule {
            field,
            grades: self.grades.clone(),
            homology,
            maps,
            runs: self.runs(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub boundary_after: Option<String>,
}

impl Run {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.start..=self.end).contains(&i)
    }
}

/// A map on homology in each degree, in the representative bases ordered by
/// quantum degree.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedMap<E> {
    pub q_shift: i64,
    pub by_degree: BTreeMap<i64, DenseMatrix<E>>,
}

/// `(q, number of representatives)` of each nonzero block in degree `p`.
fn block_layout<F: Field>(h: &BigradedHomology<F>, p: i64) -> Vec<(i64, usize)> {
    h.blocks_in_degree(p).map(|b| (b.q, b.rank())).collect()
}

pub fn induced_on_homology<F: Field>(
    f: &ChainMap<F::Elem>,
    src: &BigradedHomology<F>,
    dst: &BigradedHomology<F>,
) -> Result<InducedMap<F::Elem>, HomologyError> {
    let field = src.field();
    let mut by_degree = BTreeMap::new();
    for (k, m) in f.maps.iter().enumerate() {
        let p = f.min_degree + k as i64;
        let rows_layout = block_layout(dst, p);
        let nrows: usize = rows_layout.iter().map(|(_, r)| r).sum();
        let mut offsets = BTreeMap::new();
        let mut acc = 0;
        for (q, r) in &rows_layout {
            offsets.insert(*q, acc);
            acc += r;
        }
        let mut columns = Vec::new();
        for block in src.blocks_in_degree(p) {
            for z in block.representatives() {
                let image = m.apply(field, &z);
                let q = block.q + f.q_shift;
                let coords = dst.coordinates(p, q, &image)?;
                let mut col = vec![field.zero(); nrows];
                if let Some(&off) = offsets.get(&q) {
                    for (i, c) in coords.into_iter().enumerate() {
                        col[off + i] = c;
                    }
                }
                columns.push(col);
            }
        }
        let rows = (0..nrows)
            .map(|i| columns.iter().map(|c| c[i].clone()).collect())
            .collect();
        by_degree.insert(
            p,
            DenseMatrix {
                rows,
                ncols: columns.len(),
            },
        );
    }
    Ok(InducedMap {
        q_shift: f.q_shift,
        by_degree,
    })
}

/// Homology of every diagram of a filtration with the maps between them.
#[derive(Clone, Debug)]
pub struct PersistenceModule<F: Field> {
    field: F,
    pub grades: Vec<f64>,
    pub homology: Vec<BigradedHomology<F>>,
    /// `None` at run boundaries.
    pub maps: Vec<Option<InducedMap<F::Elem>>>,
    pub runs: Vec<Run>,
}

/// `r[i][j]` for `start <= i <= j <= end`, stored as `ranks[i - start][j - i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTable {
    pub p: i64,
    pub start: usize,
    pub ranks: Vec<Vec<usize>>,
}

impl RankTable {
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Rank from local index `i` to local index `j`; zero outside `0 <= i <= j < len`.
    pub fn get(&self, i: isize, j: isize) -> usize {
        if i < 0 || j < i || j as usize >= self.len() {
            return 0;
        }
        self.ranks[i as usize][(j - i) as usize]
    }

    /// Number of bars born at `i` and dying at `j`, with `j = len` for bars
    /// alive at the end.
    pub fn multiplicity(&self, i: usize, j: usize) -> i64 {
        let (i, j) = (i as isize, j as isize);
        self.get(i, j - 1) as i64 - self.get(i - 1, j - 1) as i64 - self.get(i, j) as i64
            + self.get(i - 1, j) as i64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub run: usize,
    pub p: i64,
    pub birth: f64,
    /// `None` when the class survives to the end of its run.
    pub death: Option<f64>,
    pub multiplicity: usize,
    pub q_shift_at_birth: i64,
}

pub type Barcode = Vec<Bar>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiEntry {
    pub p: i64,
    pub betti: LaurentPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceReport {
    pub field: String,
    pub grades: Vec<f64>,
    pub runs: Vec<Run>,
    /// Quantum shift of each step, `None` at run boundaries.
    pub q_shifts: Vec<Option<i64>>,
    pub betti: Vec<Vec<BettiEntry>>,
    pub rank_tables: Vec<RankTable>,
    pub bars: Barcode,
}

impl<F: Field> PersistenceModule<F> {
    pub fn field(&self) -> &F {
        &self.field
    }

    fn run_of(&self, i: usize) -> usize {
        self.runs
            .iter()
            .position(|r| r.contains(i))
            .expect("index in range")
    }

    /// Composite induced matrix from `i` to `j` in degree `p`.
    pub fn composite(&self, p: i64, i: usize, j: usize) -> Option<DenseMatrix<F::Elem>> {
        if j < i || self.run_of(i) != self.run_of(j) {
            return None;
        }
        let mut m = DenseMatrix::identity(&self.field, self.homology[i].total_rank(p));
        for k in i..j {
            let step = self.maps[k].as_ref()?;
            let a = step.by_degree.get(&p).cloned().unwrap_or_else(|| {
                DenseMatrix::zero(
                    &self.field,
                    self.homology[k + 1].total_rank(p),
                    self.homology[k].total_rank(p),
                )
            });
            m = a.mul(&self.field, &m);
        }
        Some(m)
    }

    /// Accumulated quantum shift from `i` to `j`.
    pub fn shift(&self, i: usize, j: usize) -> i64 {
        (i..j)
            .filter_map(|k| self.maps[k].as_ref())
            .map(|m| m.q_shift)
            .sum()
    }

    pub fn rank_table(&self, run: usize, p: i64) -> RankTable {
        let r = &self.runs[run];
        let ranks = (r.start..=r.end)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![self.homology[i].total_rank(p)];
                let mut m = DenseMatrix::identity(&self.field, self.homology[i].total_rank(p));
                for k in i..r.end {
                    let step = self.maps[k].as_ref().expect("maps inside a run");
                    let a = step.by_degree.get(&p).cloned().unwrap_or_else(|| {
                        DenseMatrix::zero(
                            &self.field,
                            self.homology[k + 1].total_rank(p),
                            self.homology[k].total_rank(p),
                        )
                    });
                    m = a.mul(&self.field, &m);
                    row.push(m.rank(&self.field));
                }
                row
            })
            .collect();
        RankTable {
            p,
            start: r.start,
            ranks,
        }
    }

    /// Homological degrees with homology somewhere in a run.
    pub fn degrees_in_run(&self, run: usize) -> Vec<i64> {
        let r = &self.runs[run];
        let mut ps: Vec<i64> = (r.start..=r.end)
            .flat_map(|i| self.homology[i].support())
            .collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    pub fn barcode_from_ranks(&self, run: usize, table: &RankTable) -> Barcode {
        let m = table.len();
        let mut bars = Vec::new();
        for i in 0..m {
            for j in i + 1..=m {
                let mu = table.multiplicity(i, j);
                debug_assert!(mu >= 0, "negative multiplicity");
                if mu > 0 {
                    let start = table.start;
                    bars.push(Bar {
                        run,
                        p: table.p,
                        birth: self.grades[start + i],
                        death: (j < m).then(|| self.grades[start + j]),
                        multiplicity: mu as usize,
                        q_shift_at_birth: self.shift(start, start + i),
                    });
                }
            }
        }
        bars
    }

    pub fn barcode(&self) -> Barcode {
        let mut bars = Vec::new();
        for run in 0..self.runs.len() {
            for p in self.degrees_in_run(run) {
                bars.extend(self.barcode_from_ranks(run, &self.rank_table(run, p)));
            }
        }
        bars
    }

    /// Graded rank of the image of `H^p(a) -> H^p(b)`, graded by target
    /// quantum degree. Zero when `a` and `b` lie in different runs.
    pub fn persistent_betti(&self, a: usize, b: usize, p: i64) -> LaurentPoly {
        let Some(m) = self.composite(p, a, b) else {
            return LaurentPoly::zero();
        };
        let shift = self.shift(a, b);
        let mut out = LaurentPoly::zero();
        let mut col = 0;
        for block in self.homology[a].blocks_in_degree(p) {
            let cols: Vec<usize> = (col..col + block.rank()).collect();
            col += block.rank();
            let r = m.select_columns(&cols).rank(&self.field);
            out.add_term(block.q + shift, r as i64);
        }
        out
    }

    pub fn report(&self) -> PersistenceReport {
        let mut rank_tables = Vec::new();
        let mut bars = Vec::new();
        for run in 0..self.runs.len() {
            for p in self.degrees_in_run(run) {
                let t = self.rank_table(run, p);
                bars.extend(self.barcode_from_ranks(run, &t));
                rank_tables.push(t);
            }
        }
        let betti = self
            .homology
            .iter()
            .map(|h| {
                h.support()
                    .into_iter()
                    .map(|p| BettiEntry {
                        p,
                        betti: crate::invariants::betti_polynomial(h, p),
                    })
                    .collect()
            })
            .collect();
        PersistenceReport {
            field: self.field.spec().to_string(),
            grades: self.grades.clone(),
            runs: self.runs.clone(),
            q_shifts: self
                .maps
                .iter()
                .map(|m| m.as_ref().map(|m| m.q_shift))
                .collect(),
            betti,
            rank_tables,
            bars,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PrimeField, Rationals};
    use crate::diagram::builders::braid;
    use crate::diagram::{apply_planar, PlanarTangleSpec};

    #[test]
    fn constant_unknot_has_two_full_bars() {
        let unknot = braid(1, &[], 1);
        let id = Step::Closure(ClosureMorphismSpec::identity(0, 1));
        let f = Filtration::new(
            vec![0.0, 1.0, 2.0],
            vec![unknot.clone(); 3],
            vec![id.clone(), id],
        )
        .unwrap();
        let m = f
            .compute(Functor::Tangle, PrimeField::new(2).unwrap())
            .unwrap();
        let bars = m.barcode();
        assert_eq!(bars.len(), 1);
        assert_eq!(
            (
                bars[0].p,
                bars[0].birth,
                bars[0].death,
                bars[0].multiplicity
            ),
            (0, 0.0, None, 2)
        );
    }

    #[test]
    fn arc_closure_then_new_circle() {
        let arc = braid(1, &[], 0);
        let closed = apply_planar(&PlanarTangleSpec::closure(), &arc).unwrap();
        let mut plus = closed.diagram.clone();
        plus.free_circles += 1;
        let f = Filtration::new(
            vec![0.0, 1.0, 2.0],
            vec![arc, closed.diagram, plus],
            vec![Step::Closure(closed.morphism), Step::Cap],
        )
        .unwrap();
        let m = f.compute(Functor::Tangle, Rationals).unwrap();
        let t = m.rank_table(0, 0);
        assert_eq!(t.ranks, vec![vec![1, 1, 1], vec![2, 2], vec![4]]);
        assert_eq!(m.persistent_betti(0, 1, 0), LaurentPoly::monomial(-1, 1));
        assert_eq!(m.persistent_betti(0, 2, 0), LaurentPoly::monomial(0, 1));
    }

    #[test]
    fn boundary_splits_runs() {
        let unknot = braid(1, &[], 1);
        let f = Filtration::new(
            vec![0.0, 1.0],
            vec![unknot.clone(), unknot],
            vec![Step::Boundary {
                reason: "test".into(),
            }],
        )
        .unwrap();
        assert_eq!(f.runs().len(), 2);
        let m = f.compute(Functor::Tangle, Rationals).unwrap();
        assert!(m.composite(0, 0, 1).is_none());
        assert!(m.persistent_betti(0, 1, 0).is_zero());
    }

    #[test]
    fn grades_must_increase() {
        let d = braid(1, &[], 1);
        let id = Step::Closure(ClosureMorphismSpec::identity(0, 1));
        assert!(matches!(
            Filtration::new(vec![1.0, 1.0], vec![d.clone(), d], vec![id]),
            Err(FiltrationError::Grades(1))
        ));
    }

    #[test]
    fn step_json_shapes() {
        let steps = vec![
            Step::Cap,
            Step::Cup { free_circle: 0 },
            Step::Boundary {
                reason: "crossing-birth".into(),
            },
            Step::Closure(ClosureMorphismSpec::identity(2, 0)),
        ];
        let text = serde_json::to_string(&steps).unwrap();
        assert!(text.starts_with(r#"[{"kind":"cap"},{"kind":"cup","free_circle":0},"#));
        assert!(text.contains(r#"{"kind":"closure","component_map":"#));
        assert_eq!(serde_json::from_str::<Vec<Step>>(&text).unwrap(), steps);
    }
}
