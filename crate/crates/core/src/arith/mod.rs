//! Exact arithmetic: integers, polynomials, matrices, Frobenius power sums
//! and Sturm sequences.

pub mod frobenius;
pub mod int;
pub mod matrix;
pub mod poly;
pub mod sturm;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use frobenius::{
    dickson_lift, dickson_polynomial, frobenius_l_factor, newton_power_sums,
    real_weil_polynomial, PowerSumTable,
};
pub use matrix::Matrix;
pub use poly::{Poly, Scalar};

/// Polynomial with arbitrary-precision integer coefficients.
pub type IntPoly = Poly<BigInt>;
/// Polynomial with exact rational coefficients.
pub type RatPoly = Poly<BigRational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("polynomial is not monic: coefficients {0}")]
    NotMonic(String),
    #[error("polynomial of degree 0 has no roots to sum over")]
    ConstantPolynomial,
    #[error("{0} is not prime")]
    NotPrime(u64),
}
