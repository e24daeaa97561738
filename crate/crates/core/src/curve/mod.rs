//! Borel–Cartan levels, the Atkin–Lehner-type group `(Z/2Z)^r`, its
//! subgroups and characters, and the compact table notation for quotients.

mod notation;
mod subgroup;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::arith::int::{divisors, factorize, gcd, valuation};

pub use notation::{format_table_notation, parse_table_notation};
pub use subgroup::{enumerate_subgroups, k_perp, AlSubgroup, SignCharacter, MAX_ENUMERATION_RANK};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("n0 = {n0} and n_ns = {n_ns} are not coprime")]
    NotCoprime { n0: u64, n_ns: u64 },
    #[error("levels must be positive")]
    ZeroLevel,
    #[error("{k} is not an exact divisor of {n}")]
    NotExactDivisor { k: u64, n: u64 },
    #[error("vector {vector:#b} has bits beyond rank {r}")]
    VectorOutOfRange { vector: u32, r: usize },
    #[error("rank {r} exceeds the enumeration limit {max}")]
    RankTooLarge { r: usize, max: usize },
    #[error("subgroup of rank {got} does not match a level with r = {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("malformed curve notation {text:?}: {reason}")]
    Syntax { text: String, reason: String },
    #[error("index {index} out of range 1..={r}")]
    IndexOutOfRange { index: usize, r: usize },
    #[error("{level} is not a relevant level of {curve}")]
    NotRelevant { level: u64, curve: String },
}

/// One prime power `q = p^e` exactly dividing `n = n0·n_ns`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
    pub q: u64,
    /// True when `q` divides `n_ns` (a non-split Cartan prime).
    pub nonsplit: bool,
}

/// The level pair `(n0, n_ns)` of `X(n0, n_ns)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BorelCartanLevel {
    n0: u64,
    n_ns: u64,
    prime_powers: Vec<PrimePower>,
}

impl BorelCartanLevel {
    pub fn new(n0: u64, n_ns: u64) -> Result<Self, CurveError> {
        if n0 == 0 || n_ns == 0 {
            return Err(CurveError::ZeroLevel);
        }
        if gcd(n0, n_ns) != 1 {
            return Err(CurveError::NotCoprime { n0, n_ns });
        }
        let prime_powers = factorize(n0 * n_ns)
            .into_iter()
            .map(|(p, e)| PrimePower {
                p,
                e,
                q: p.pow(e),
                nonsplit: n_ns.is_multiple_of(p),
            })
            .collect();
        Ok(BorelCartanLevel { n0, n_ns, prime_powers })
    }

    pub fn n0(&self) -> u64 {
        self.n0
    }

    pub fn n_ns(&self) -> u64 {
        self.n_ns
    }

    pub fn n(&self) -> u64 {
        self.n0 * self.n_ns
    }

    /// Number of distinct primes of `n`.
    pub fn r(&self) -> usize {
        self.prime_powers.len()
    }

    /// Prime powers ordered by underlying prime.
    pub fn prime_powers(&self) -> &[PrimePower] {
        &self.prime_powers
    }

    /// GF(2) vector of an exact divisor of `n`.
    pub fn encode(&self, k: u64) -> Result<u32, CurveError> {
        let n = self.n();
        if k == 0 || !n.is_multiple_of(k) || gcd(k, n / k) != 1 {
            return Err(CurveError::NotExactDivisor { k, n });
        }
        Ok(self
            .prime_powers
            .iter()
            .enumerate()
            .filter(|(_, pp)| k.is_multiple_of(pp.p))
            .fold(0, |acc, (i, _)| acc | 1 << i))
    }

    /// The exact divisor `∏ q_i` over the set bits of `v`.
    pub fn decode(&self, v: u32) -> u64 {
        self.prime_powers
            .iter()
            .enumerate()
            .filter(|(i, _)| v >> i & 1 == 1)
            .map(|(_, pp)| pp.q)
            .product()
    }

    /// `{ d0·d_ns² : d0 | n0, d_ns | n_ns }`.
    pub fn relevant_levels(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for d0 in divisors(self.n0) {
            for dns in divisors(self.n_ns) {
                out.insert(d0 * dns * dns);
            }
        }
        out
    }

    /// Splits a relevant level `N` as `(d0, d_ns)` with `N = d0·d_ns²`.
    pub fn split_level(&self, level: u64) -> Result<(u64, u64), CurveError> {
        let not_relevant = || CurveError::NotRelevant {
            level,
            curve: format!("({},{})", self.n0, self.n_ns),
        };
        if level == 0 {
            return Err(not_relevant());
        }
        let dns: u64 = self
            .prime_powers
            .iter()
            .filter(|pp| pp.nonsplit)
            .map(|pp| pp.p.pow(valuation(level, pp.p) / 2))
            .product();
        let sq = dns * dns;
        if !level.is_multiple_of(sq) || !self.n_ns.is_multiple_of(dns) {
            return Err(not_relevant());
        }
        let d0 = level / sq;
        if !self.n0.is_multiple_of(d0) {
            return Err(not_relevant());
        }
        Ok((d0, dns))
    }
}

impl fmt::Display for BorelCartanLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n0, self.n_ns)
    }
}

/// `X(n0, n_ns)/K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuotientCurve {
    level: BorelCartanLevel,
    subgroup: AlSubgroup,
}

impl QuotientCurve {
    pub fn new(level: BorelCartanLevel, subgroup: AlSubgroup) -> Result<Self, CurveError> {
        if subgroup.r() != level.r() {
            return Err(CurveError::RankMismatch {
                expected: level.r(),
                got: subgroup.r(),
            });
        }
        Ok(QuotientCurve { level, subgroup })
    }

    /// Quotient by the subgroup generated by the given exact divisors.
    pub fn from_divisors(n0: u64, n_ns: u64, gens: &[u64]) -> Result<Self, CurveError> {
        let level = BorelCartanLevel::new(n0, n_ns)?;
        let vecs = gens.iter().map(|k| level.encode(*k)).collect::<Result<Vec<_>, _>>()?;
        let subgroup = AlSubgroup::generated(level.r(), vecs)?;
        QuotientCurve::new(level, subgroup)
    }

    pub fn level(&self) -> &BorelCartanLevel {
        &self.level
    }

    pub fn subgroup(&self) -> &AlSubgroup {
        &self.subgroup
    }

    /// The canonical generators as exact divisors of `n`.
    pub fn generator_divisors(&self) -> Vec<u64> {
        self.subgroup.basis().iter().map(|v| self.level.decode(*v)).collect()
    }
}

impl fmt::Display for QuotientCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_table_notation(self))
    }
}

impl std::str::FromStr for QuotientCurve {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self, CurveError> {
        parse_table_notation(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_basics() {
        let l = BorelCartanLevel::new(6, 7).unwrap();
        assert_eq!(l.r(), 3);
        assert_eq!(l.encode(6).unwrap(), 0b011);
        assert_eq!(l.decode(0b101), 14);
        assert!(l.encode(4).is_err());
        assert_eq!(
            l.relevant_levels().into_iter().collect::<Vec<_>>(),
            vec![1, 2, 3, 6, 49, 98, 147, 294]
        );
        assert_eq!(l.split_level(147).unwrap(), (3, 7));
        assert_eq!(l.split_level(7).map_err(|_| ()), Err(()));
        assert_eq!(
            BorelCartanLevel::new(6, 4),
            Err(CurveError::NotCoprime { n0: 6, n_ns: 4 })
        );
    }

    #[test]
    fn split_with_square_nonsplit_part() {
        let l = BorelCartanLevel::new(5, 9).unwrap();
        assert_eq!(l.split_level(405).unwrap(), (5, 9));
        assert_eq!(l.split_level(9).unwrap(), (1, 3));
        assert!(l.split_level(27).is_err());
    }
}
