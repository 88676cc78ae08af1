//! Coefficients, tensor generators, local maps and gradings.

pub mod field;
pub mod laurent;
pub mod local;

pub use field::{Field, FieldError, FieldSpec, PrimeField, Rationals};
pub use laurent::{qdim, LaurentPoly};
pub use local::{
    apply_saddle, local_map, phi, tensor_basis, theta, unit_counit, AlgebraError, Functor,
    Generator, LocalMatrix, SaddleKind, Symbol, UnitCounit,
};
