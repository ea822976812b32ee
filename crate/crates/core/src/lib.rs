//! Exact computation of Grothendieck-ring presentations for toric stacks.
//!
//! The crate is organized bottom-up:
//!
//! * [`lattice`]: integer matrices, Smith/Hermite normal forms, finitely
//!   generated abelian groups;
//! * [`fan`]: fans, stacky fans, face enumeration, shelling orders and the
//!   reduction of generically stacky data to subgroup form;
//! * [`laurent`]: Laurent polynomials over ℤ, strong Gröbner bases,
//!   quotient ranks, group rings and Koszul homology;
//! * [`ktheory`]: the K₀ presentations and their verification reports;
//! * [`bundles`]: Stanley–Reisner algebras over a coefficient ring with
//!   designated units.

pub mod error;
pub mod fan;
pub mod lattice;
pub mod laurent;
pub mod ktheory;
pub mod bundles;

pub use error::{Error, Result};
