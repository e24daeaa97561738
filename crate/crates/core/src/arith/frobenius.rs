//! Frobenius data derived from a Hecke characteristic polynomial.
//!
//! For a newform class whose `T_p` eigenvalues are the roots `a` of a monic
//! integer polynomial `C`, each root contributes a Frobenius pair `(α, β)`
//! with `α + β = a` and `αβ = p`. Everything here is computed symbolically
//! from the coefficients of `C`; no root is ever approximated.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::int::is_prime;
use super::matrix::Matrix;
use super::poly::{Poly, Scalar};
use super::{ArithError, IntPoly};

fn check_monic<T: Scalar>(c: &Poly<T>) -> Result<usize, ArithError> {
    match c.degree() {
        None | Some(0) => Err(ArithError::ConstantPolynomial),
        Some(d) if c.is_monic() => Ok(d),
        Some(_) => Err(ArithError::NotMonic(format!("{:?}", c.coeffs()))),
    }
}

fn check_prime(p: u64) -> Result<(), ArithError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(ArithError::NotPrime(p))
    }
}

/// Power sums `p_1, ..., p_max_j` of the roots of a monic polynomial, by
/// Newton's identities. No division is needed for a monic input, so the
/// result stays in the coefficient ring.
pub fn newton_power_sums<T: Scalar>(c: &Poly<T>, max_j: usize) -> Result<Vec<T>, ArithError> {
    let d = check_monic(c)?;
    // e[i] is the coefficient of x^(d-i)
    let e = |i: usize| -> T {
        if i > d {
            T::zero()
        } else {
            c.coeff(d - i)
        }
    };
    let mut sums: Vec<T> = Vec::with_capacity(max_j);
    for k in 1..=max_j {
        let mut kt = T::zero();
        for _ in 0..k {
            kt = kt + T::one();
        }
        let mut acc = -(kt * e(k));
        for i in 1..k.min(d + 1) {
            acc = acc - e(i) * sums[k - i - 1].clone();
        }
        sums.push(acc);
    }
    Ok(sums)
}

/// The polynomial `s_k(a) = α^k + β^k` in `a = α + β` when `αβ = p`:
/// `s_0 = 2`, `s_1 = a`, `s_k = a·s_{k-1} − p·s_{k-2}`.
pub fn dickson_polynomial(p: &BigInt, k: u32) -> IntPoly {
    let mut prev = Poly::constant(BigInt::from(2));
    if k == 0 {
        return prev;
    }
    let mut cur = Poly::x();
    let x = Poly::x();
    for _ in 1..k {
        let next = &(&x * &cur) - &prev.scale(p);
        prev = cur;
        cur = next;
    }
    cur
}

/// `S_k = Σ_σ (α_σ^k + β_σ^k)` over all roots `a_σ` of `c`.
pub fn dickson_lift(c: &IntPoly, p: u64, k: u32) -> Result<BigInt, ArithError> {
    let d = check_monic(c)?;
    check_prime(p)?;
    if k == 0 {
        return Ok(BigInt::from(2 * d));
    }
    let sums = newton_power_sums(c, k as usize)?;
    Ok(lift_with_sums(d, &sums, &dickson_polynomial(&BigInt::from(p), k)))
}

fn lift_with_sums(d: usize, sums: &[BigInt], s: &IntPoly) -> BigInt {
    s.coeffs()
        .iter()
        .enumerate()
        .fold(BigInt::zero(), |acc, (i, coef)| {
            let power_sum = if i == 0 {
                BigInt::from(d)
            } else {
                sums[i - 1].clone()
            };
            acc + coef * power_sum
        })
}

/// `S_1, ..., S_max_k` for one Hecke polynomial at one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSumTable {
    p: u64,
    degree: usize,
    sums: Vec<BigInt>,
}

impl PowerSumTable {
    pub fn new(c: &IntPoly, p: u64, max_k: u32) -> Result<Self, ArithError> {
        let d = check_monic(c)?;
        check_prime(p)?;
        let newton = newton_power_sums(c, max_k as usize)?;
        let pb = BigInt::from(p);
        let x = Poly::x();
        let mut sums = Vec::with_capacity(max_k as usize);
        let mut prev = Poly::constant(BigInt::from(2));
        let mut cur: IntPoly = Poly::x();
        for k in 1..=max_k {
            if k > 1 {
                let next = &(&x * &cur) - &prev.scale(&pb);
                prev = std::mem::replace(&mut cur, next);
            }
            sums.push(lift_with_sums(d, &newton, &cur));
        }
        Ok(PowerSumTable { p, degree: d, sums })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn max_k(&self) -> u32 {
        self.sums.len() as u32
    }

    /// `S_k`; `S_0 = 2d`. Panics if `k > max_k`.
    pub fn get(&self, k: u32) -> BigInt {
        if k == 0 {
            BigInt::from(2 * self.degree)
        } else {
            self.sums[k as usize - 1].clone()
        }
    }

    pub fn sums(&self) -> &[BigInt] {
        &self.sums
    }
}

/// `x^d · C(x + p/x) = Π_σ (x² − a_σ x + p)`, the degree-`2d` Frobenius
/// factor of the L-polynomial attached to the class.
pub fn frobenius_l_factor(c: &IntPoly, p: u64) -> Result<IntPoly, ArithError> {
    let d = check_monic(c)?;
    check_prime(p)?;
    let quad = Poly::new(vec![BigInt::from(p), BigInt::zero(), BigInt::one()]);
    let mut out = Poly::zero();
    let mut quad_pow = Poly::one();
    for i in 0..=d {
        let term = &quad_pow * &Poly::monomial(c.coeff(i), d - i);
        out = &out + &term;
        quad_pow = &quad_pow * &quad;
    }
    Ok(out)
}

/// Monic polynomial whose roots are `s_k(a_σ) = α_σ^k + β_σ^k`, obtained as
/// the characteristic polynomial of `s_k` applied to the companion matrix
/// of `c`.
pub fn real_weil_polynomial(c: &IntPoly, p: u64, k: u32) -> Result<IntPoly, ArithError> {
    let d = check_monic(c)?;
    check_prime(p)?;
    if k == 0 {
        return Ok(Poly::new(vec![BigInt::from(-2), BigInt::one()]).pow(d as u32));
    }
    let companion = Matrix::companion(c);
    let pb = BigInt::from(p);
    let mut prev = Matrix::identity(d).scale(&BigInt::from(2));
    let mut cur = companion.clone();
    for _ in 1..k {
        let next = (&companion * &cur).sub(&prev.scale(&pb));
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur.charpoly())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn ip(c: &[i64]) -> IntPoly {
        Poly::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    #[test]
    fn newton_examples() {
        let c = ip(&[1, -3, 1]);
        let sums = newton_power_sums(&c, 2).unwrap();
        assert_eq!(sums, vec![BigInt::from(3), BigInt::from(7)]);
        // x - c gives c^k
        let sums = newton_power_sums(&ip(&[-5, 1]), 4).unwrap();
        assert_eq!(sums, [5, 25, 125, 625].map(BigInt::from).to_vec());
    }

    #[test]
    fn newton_over_rationals() {
        let c = ip(&[1, -3, 1]).map(|v| BigRational::from_integer(v.clone()));
        let sums = newton_power_sums(&c, 3).unwrap();
        assert_eq!(sums[2], BigRational::from_integer(BigInt::from(18)));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            newton_power_sums(&ip(&[1, 2]), 1),
            Err(ArithError::NotMonic("[1, 2]".into()))
        );
        assert_eq!(dickson_lift(&ip(&[3]), 11, 1), Err(ArithError::ConstantPolynomial));
        assert_eq!(dickson_lift(&ip(&[2, 1]), 12, 1), Err(ArithError::NotPrime(12)));
    }

    #[test]
    fn dickson_examples() {
        let c = ip(&[2, 1]);
        assert_eq!(dickson_lift(&c, 11, 1).unwrap(), BigInt::from(-2));
        assert_eq!(dickson_lift(&c, 11, 5).unwrap(), BigInt::from(-802));
        // recurrence values s_2..s_5 for a = -2, p = 11
        let steps: Vec<BigInt> = (2..=5).map(|k| dickson_lift(&c, 11, k).unwrap()).collect();
        assert_eq!(steps, [-18, 58, 82, -802].map(BigInt::from).to_vec());
        assert_eq!(dickson_lift(&ip(&[-5, 1]), 11, 5).unwrap(), BigInt::from(-725));
        assert_eq!(dickson_lift(&ip(&[1, -3, 1]), 2, 0).unwrap(), BigInt::from(4));
    }

    #[test]
    fn table_matches_single_lifts() {
        let c = ip(&[-1, 2, 1]);
        let t = PowerSumTable::new(&c, 2, 7).unwrap();
        for k in 0..=7 {
            assert_eq!(t.get(k), dickson_lift(&c, 2, k).unwrap());
        }
    }

    #[test]
    fn l_factor_examples() {
        assert_eq!(frobenius_l_factor(&ip(&[2, 1]), 11).unwrap(), ip(&[11, 2, 1]));
        assert_eq!(frobenius_l_factor(&ip(&[0, 1]), 7).unwrap(), ip(&[7, 0, 1]));
        assert_eq!(
            frobenius_l_factor(&ip(&[1, -3, 1]), 2).unwrap(),
            ip(&[4, -6, 5, -3, 1])
        );
    }

    #[test]
    fn real_weil_examples() {
        assert_eq!(real_weil_polynomial(&ip(&[2, 1]), 11, 5).unwrap(), ip(&[802, 1]));
        let c = ip(&[-1, 3, 1, 1]);
        assert_eq!(real_weil_polynomial(&c, 3, 1).unwrap(), c);
    }
}
