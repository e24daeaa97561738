//! Genus, point counts over `F_{p^k}`, Weil polynomials and the
//! Hasse–Weil–Serre bound.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::int::{is_prime, isqrt, prime_power};
use crate::arith::{
    dickson_lift, frobenius_l_factor, newton_power_sums, real_weil_polynomial, ArithError, IntPoly,
    Poly,
};
use crate::curve::QuotientCurve;
use crate::multiplicity::IsogenyDecomposition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("p = {p} divides n = {n}: the curve has bad reduction there")]
    BadReduction { p: u64, n: u64 },
    #[error("{label}: no Hecke polynomial at p = {p}")]
    MissingCharpoly { label: String, p: u64 },
    #[error("invalid field size {0:?}: expected p^k or a prime power")]
    InvalidFieldSize(String),
    #[error("{curve}: count {count} over F_{q} violates the Weil bound for genus {genus}")]
    WeilViolation {
        curve: String,
        q: String,
        count: String,
        genus: u64,
    },
    #[error("upper bound {m} is below q + 1 = {q_plus_one}")]
    BoundBelowTrivial { m: String, q_plus_one: String },
}

/// A finite field size `q = p^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSize {
    pub p: u64,
    pub k: u32,
}

impl FieldSize {
    pub fn new(p: u64, k: u32) -> Result<Self, PointError> {
        if !is_prime(p) || k == 0 {
            return Err(PointError::InvalidFieldSize(format!("{p}^{k}")));
        }
        Ok(FieldSize { p, k })
    }

    pub fn q(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.k as usize)
    }
}

impl FromStr for FieldSize {
    type Err = PointError;

    /// Accepts `p^k` or a plain prime power such as `161051`.
    fn from_str(s: &str) -> Result<Self, PointError> {
        let bad = || PointError::InvalidFieldSize(s.to_string());
        let t = s.trim();
        if let Some((p, k)) = t.split_once('^') {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let k: u32 = k.trim().parse().map_err(|_| bad())?;
            return FieldSize::new(p, k).map_err(|_| bad());
        }
        let n: u64 = t.parse().map_err(|_| bad())?;
        let (p, k) = prime_power(n).ok_or_else(bad)?;
        FieldSize::new(p, k)
    }
}

impl fmt::Display for FieldSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.k)
        }
    }
}

/// `Σ m_f · dim A_f`.
pub fn genus(dec: &IsogenyDecomposition) -> u64 {
    dec.dimension()
}

/// `⌊2√q⌋`, as the integer square root of `4q`.
pub fn floor_two_sqrt(q: &BigInt) -> BigInt {
    isqrt(&(q * 4u32))
}

/// `q + 1 + g·⌊2√q⌋`.
pub fn hws_bound(g: u64, q: FieldSize) -> BigInt {
    let q = q.q();
    &q + 1u32 + floor_two_sqrt(&q) * g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub curve: QuotientCurve,
    pub genus: u64,
    pub q: FieldSize,
    pub count: BigInt,
    /// `Σ_f m_f S_k(f)`
    pub trace_sum: BigInt,
    pub maximal: bool,
    pub hws_bound: BigInt,
}

fn check_good_reduction(curve: &QuotientCurve, p: u64) -> Result<(), PointError> {
    let n = curve.level().n();
    if n.is_multiple_of(p) {
        return Err(PointError::BadReduction { p, n });
    }
    Ok(())
}

/// Assembles a [`CountResult`] from a precomputed trace sum and checks the
/// Weil bound.
pub fn count_from_trace(
    curve: &QuotientCurve,
    genus: u64,
    q: FieldSize,
    trace_sum: BigInt,
) -> Result<CountResult, PointError> {
    let qq = q.q();
    let count = &qq + 1u32 - &trace_sum;
    let bound = hws_bound(genus, q);
    if count.is_negative() || trace_sum.abs() > floor_two_sqrt(&qq) * genus {
        return Err(PointError::WeilViolation {
            curve: curve.to_string(),
            q: q.to_string(),
            count: count.to_string(),
            genus,
        });
    }
    Ok(CountResult {
        curve: curve.clone(),
        genus,
        q,
        maximal: count == bound,
        count,
        trace_sum,
        hws_bound: bound,
    })
}

/// `#X(F_q) = q + 1 − Σ_f m_f S_k(f)`.
pub fn count_points(dec: &IsogenyDecomposition, q: FieldSize) -> Result<CountResult, PointError> {
    check_good_reduction(&dec.curve, q.p)?;
    let mut trace_sum = BigInt::zero();
    for t in &dec.terms {
        let c = charpoly(t, q.p)?;
        trace_sum += dickson_lift(c, q.p, q.k)? * t.multiplicity;
    }
    count_from_trace(&dec.curve, genus(dec), q, trace_sum)
}

fn charpoly(t: &crate::multiplicity::DecompositionTerm, p: u64) -> Result<&IntPoly, PointError> {
    t.form.charpoly(p).ok_or_else(|| PointError::MissingCharpoly {
        label: t.form.label.clone(),
        p,
    })
}

/// `∏_f h_f^{m_f}` where `h_f` has roots `α^k + β^k`; degree equals the
/// genus.
pub fn real_weil_poly_of_curve(dec: &IsogenyDecomposition, q: FieldSize) -> Result<IntPoly, PointError> {
    check_good_reduction(&dec.curve, q.p)?;
    let mut out = Poly::one();
    for t in &dec.terms {
        let h = real_weil_polynomial(charpoly(t, q.p)?, q.p, q.k)?;
        out = &out * &h.pow(t.multiplicity as u32);
    }
    Ok(out)
}

/// `∏_f (x^d C_p(x + p/x))^{m_f}`, of degree `2g`, whose roots are all the
/// Frobenius eigenvalues over `F_p`.
pub fn l_polynomial(dec: &IsogenyDecomposition, p: u64) -> Result<IntPoly, PointError> {
    check_good_reduction(&dec.curve, p)?;
    let mut out = Poly::one();
    for t in &dec.terms {
        let l = frobenius_l_factor(charpoly(t, p)?, p)?;
        out = &out * &l.pow(t.multiplicity as u32);
    }
    Ok(out)
}

/// `q + 1 − (k-th power sum of the roots of L)`.
pub fn count_from_l_polynomial(l: &IntPoly, q: FieldSize) -> Result<BigInt, PointError> {
    let qq = q.q();
    if l.degree() == Some(0) {
        return Ok(qq + 1u32);
    }
    let sums = newton_power_sums(l, q.k as usize)?;
    Ok(qq + 1u32 - &sums[q.k as usize - 1])
}

/// The "nice record" test: `count ≥ q + 1 + (M − q − 1)/√2`, decided in
/// squared integer form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceThreshold {
    q_plus_one: BigInt,
    gap: BigInt,
}

impl NiceThreshold {
    pub fn new(q: FieldSize, upper_bound: BigInt) -> Result<Self, PointError> {
        let q_plus_one = q.q() + 1u32;
        if upper_bound < q_plus_one {
            return Err(PointError::BoundBelowTrivial {
                m: upper_bound.to_string(),
                q_plus_one: q_plus_one.to_string(),
            });
        }
        let gap = upper_bound - &q_plus_one;
        Ok(NiceThreshold { q_plus_one, gap })
    }

    pub fn is_nice(&self, count: &BigInt) -> bool {
        if count < &self.q_plus_one {
            return false;
        }
        let excess = count - &self.q_plus_one;
        &excess * &excess * 2u32 >= &self.gap * &self.gap
    }

    /// The smallest nice count.
    pub fn min_count(&self) -> BigInt {
        let g2 = &self.gap * &self.gap;
        let mut c = isqrt(&(&g2 / 2u32));
        while &c * &c * 2u32 < g2 {
            c += BigInt::one();
        }
        &self.q_plus_one + c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_sizes() {
        assert_eq!("11^5".parse::<FieldSize>().unwrap(), FieldSize { p: 11, k: 5 });
        assert_eq!("161051".parse::<FieldSize>().unwrap(), FieldSize { p: 11, k: 5 });
        assert_eq!("7".parse::<FieldSize>().unwrap(), FieldSize { p: 7, k: 1 });
        assert!("12".parse::<FieldSize>().is_err());
        assert!("4^2".parse::<FieldSize>().is_err());
        assert!("11^0".parse::<FieldSize>().is_err());
        assert_eq!(FieldSize::new(11, 1).unwrap().to_string(), "11");
        assert_eq!(FieldSize::new(2, 7).unwrap().to_string(), "2^7");
    }

    #[test]
    fn bounds() {
        let q = FieldSize::new(11, 5).unwrap();
        assert_eq!(hws_bound(0, q), BigInt::from(161052));
        assert_eq!(hws_bound(7, q), BigInt::from(166666));
        assert_eq!(hws_bound(12, q), BigInt::from(170676));
    }

    #[test]
    fn nice_threshold() {
        let q = FieldSize::new(11, 5).unwrap();
        let t = NiceThreshold::new(q, BigInt::from(166666)).unwrap();
        assert_eq!(t.min_count(), BigInt::from(165022));
        assert!(t.is_nice(&BigInt::from(165022)));
        assert!(!t.is_nice(&BigInt::from(165021)));
        assert!(t.is_nice(&BigInt::from(166666)));
        let trivial = NiceThreshold::new(q, BigInt::from(161052)).unwrap();
        assert_eq!(trivial.min_count(), BigInt::from(161052));
        assert!(NiceThreshold::new(q, BigInt::from(161051)).is_err());
    }
}
