//! Khovanov homology of tangle diagrams, with arcs carrying their own
//! module, and persistent Khovanov homology of tangle filtrations.
//!
//! The pipeline runs diagram → state cube → cochain complex → bigraded
//! homology. Closure morphisms and elementary cobordisms induce chain maps,
//! which give rank tables and barcodes over a filtration. The [`ingest`]
//! module builds such filtrations from 3-D curves cut by growing disks.

pub mod algebra;
pub mod complex;
pub mod cube;
pub mod diagram;
pub mod homology;
pub mod ingest;
pub mod invariants;
pub mod linalg;
pub mod persistence;

pub use algebra::{Field, FieldSpec, Functor, LaurentPoly, PrimeField, Rationals};
pub use complex::{BuildOptions, ChainComplex};
pub use diagram::{Tangle, TangleDiagram};
pub use homology::BigradedHomology;
