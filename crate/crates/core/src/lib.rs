//! Symmetry groups of smooth cubic fourfolds.
//!
//! The crate computes the diagonal symmetry group of a monomial support
//! ([`diaggroup`]), certifies smoothness of generic members with Gröbner bases
//! over prime fields ([`smoothcert`]), enumerates admissible supports
//! ([`enumerator`]), and analyses invariant families of non-diagonal
//! monomial-matrix groups ([`pauli`]).
//!
//! Data-parallel work goes through [`par`]; with the `parallel` feature off
//! (or [`Mode::Sequential`] at runtime) everything runs on one thread.

pub mod cubicdomain;
pub mod diaggroup;
pub mod enumerator;
pub mod lattice;
pub mod par;
pub mod pauli;
pub mod smoothcert;

pub use par::Mode;
