//! Exact cyclotomic arithmetic and verification routines for the
//! Couwenberg-Heckman-Looijenga lattices attached to exceptional
//! Shephard-Todd groups.

pub mod arith;
pub mod catalog;
pub mod cusp;
pub mod cyclofield;
pub mod error;
pub mod fingroup;
pub mod exactlin;
pub mod intmath;
pub mod reflect;

pub use cyclofield::{CycElem, CycField, GaloisAut};
pub use exactlin::{HermForm, MatC, Poly, Signature};
pub use error::{Error, Result};
