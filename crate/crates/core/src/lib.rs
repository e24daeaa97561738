pub mod arith;

pub use arith::{IntPoly, RatPoly};
pub mod newform;
pub mod curve;
pub mod multiplicity;
pub mod lattice;
pub mod points;
pub mod scanner;
