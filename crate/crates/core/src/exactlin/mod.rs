//! Exact dense linear algebra over cyclotomic fields.

mod form;
mod matrix;
mod poly;

pub use form::{HermForm, Signature};
pub use matrix::{dot, MatC};
pub use poly::Poly;
