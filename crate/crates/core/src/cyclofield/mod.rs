//! Exact arithmetic in cyclotomic fields Q(zeta_n).

mod elem;
mod field;
pub mod numeric;

pub use elem::{CycElem, GaloisAut};
pub(crate) use elem::parse_rational;
pub use field::{cyclotomic_polynomial, CycField};
pub use numeric::{Ball, ComplexBall};
