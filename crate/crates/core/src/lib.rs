//! Machinery for building and certifying the inconsistency of the polynomial
//! system that obstructs algebraic exponentiation in varieties of
//! non-associative algebras without degree-2 identities.
//!
//! The crate is layered bottom-up:
//!
//! * [`coeff`] exact scalars: rationals and prime fields;
//! * [`cpoly`] commutative polynomials in the sixteen parameters, monomial orders,
//!   and the text grammar shared by the data file and the script exporter;
//! * [`magma`] non-associative words, types and anticommutative normal forms;
//! * [`identity`] the λ/μ expansion rules and the three generation pipelines;
//! * [`groebner`] Buchberger's algorithm, ideal membership and certificates.

pub mod coeff;
pub mod cpoly;
pub mod groebner;
pub mod identity;
pub mod magma;

pub use coeff::{FieldKind, FieldSpec, Scalar};
pub use cpoly::{ExpVec, MonomialOrder, OrderKind, ParamPoly, VarList};

pub use groebner::{GroebnerBasis, Ideal, Verdict};
pub use identity::ObstructionSystem;
pub use magma::{Letter, NAPoly, Word};
