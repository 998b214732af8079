//! Exact computational algebra for bilinear spaces over a fixed field.
//!
//! The crate provides:
//!
//! - exact scalars over Q, GF(p) and Q(sqrt d) ([`field`]);
//! - exact linear algebra: row reduction, solving, subspace lattice
//!   ([`linalg`]);
//! - bilinear spaces as Gram matrices with a flavor (plain, symmetric,
//!   alternating), bilinear monomorphisms, radicals and non-degenerate
//!   completion ([`space`]);
//! - the linear-independence relation and the amalgamation constructions
//!   over it ([`indep`]);
//! - positive-existential formulas over the vector-space signature enriched
//!   with bilinear-product relations: parser, printer, normal forms and the
//!   translation of regular formulas into linear systems over Gram unknowns
//!   ([`formula`]);
//! - existentially-closed-model semantics at finite scale: extension
//!   solving, evaluation, quantifier-free type invariants, isolating
//!   formulas, finite-field quantifier elimination and the instability
//!   witness ([`ec`]);
//! - self-verifying reproductions of the classical counterexamples
//!   ([`gallery`]).

pub mod ec;
pub mod error;
pub mod field;
pub mod formula;
pub mod gallery;
pub mod indep;
pub mod linalg;
pub mod sample;
pub mod space;

pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
pub use linalg::{Matrix, Subspace, Vector};
pub use space::{BilMap, BilinearSpace, Flavor};
