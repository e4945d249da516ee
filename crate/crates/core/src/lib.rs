//! Arithmetic invariants of number fields and families: splitting counts,
//! residues of Dedekind zeta functions, quadratic class data, and the
//! Brauer–Siegel ratios and bounds built from them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod bounds;
pub mod bs;
pub mod error;
pub mod family;
pub mod numfield;
pub mod phi;
pub mod polyarith;
pub mod quadratic;
pub mod residue;
pub mod scalar;
pub mod splitting;

pub use bs::{BSReport, FieldRecord};
pub use error::{Error, Result};
pub use family::{Classification, FamilySpec, FieldFamily, Generator, InvariantEstimate};
pub use numfield::NumberField;
pub use polyarith::{IntPoly, ModPoly};
pub use quadratic::ClassData;
pub use residue::ResidueEstimate;
pub use scalar::Real;
pub use splitting::SplittingProfile;

/// Invariant vector over `f64`.
pub type PhiVector = phi::Phi<f64>;
/// Zero-free region parameters over `f64`.
pub type BoundParams = bounds::SolvableBoundParams<f64>;
