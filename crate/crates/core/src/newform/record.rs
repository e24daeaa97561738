use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use super::StoreError;
use crate::arith::int::{factorize, is_prime};
use crate::arith::sturm::roots_within;
use crate::arith::IntPoly;

/// An Atkin–Lehner eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// One Galois orbit of weight-2 newforms with trivial character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewformRecord {
    pub label: String,
    pub level: u64,
    pub dim: usize,
    /// Keyed by the prime powers exactly dividing `level`.
    pub al_signs: BTreeMap<u64, Sign>,
    /// Extra signs keyed by prime powers coprime to `level`.
    pub al_extended: BTreeMap<u64, Sign>,
    /// Characteristic polynomial of `T_p`, keyed by `p`.
    pub hecke_charpolys: BTreeMap<u64, IntPoly>,
}

impl NewformRecord {
    /// The Atkin–Lehner sign at the `p`-part of the level, if `p | level`.
    pub fn level_sign(&self, p: u64) -> Option<Sign> {
        self.al_signs
            .iter()
            .find(|(q, _)| *q % p == 0)
            .map(|(_, s)| *s)
    }

    pub fn charpoly(&self, p: u64) -> Option<&IntPoly> {
        self.hecke_charpolys.get(&p)
    }

    /// Checks every record invariant, including the Weil bound.
    pub fn validate(&self) -> Result<(), StoreError> {
        let bad = |reason: String| StoreError::InvalidRecord {
            label: self.label.clone(),
            reason,
        };
        if self.level == 0 {
            return Err(bad("level must be positive".into()));
        }
        if self.dim == 0 {
            return Err(bad("dim must be positive".into()));
        }
        let exact: Vec<u64> = factorize(self.level)
            .into_iter()
            .map(|(p, e)| p.pow(e))
            .collect();
        for q in &exact {
            if !self.al_signs.contains_key(q) {
                return Err(StoreError::MissingAlSign {
                    label: self.label.clone(),
                    q: *q,
                });
            }
        }
        if let Some(q) = self.al_signs.keys().find(|q| !exact.contains(q)) {
            return Err(bad(format!(
                "al_signs key {q} is not a prime power exactly dividing {}",
                self.level
            )));
        }
        for q in self.al_extended.keys() {
            let coprime = num_integer::gcd(*q, self.level) == 1;
            if !coprime || crate::arith::int::prime_power(*q).is_none() {
                return Err(bad(format!(
                    "al_extended key {q} is not a prime power coprime to {}",
                    self.level
                )));
            }
        }
        for (p, c) in &self.hecke_charpolys {
            if !is_prime(*p) {
                return Err(bad(format!("charpoly key {p} is not prime")));
            }
            if !c.is_monic() {
                return Err(bad(format!("charpoly at {p} is not monic")));
            }
            if c.degree() != Some(self.dim) {
                return Err(bad(format!(
                    "charpoly at {p} has degree {:?}, expected {}",
                    c.degree(),
                    self.dim
                )));
            }
            if !roots_within(c, &BigInt::from(4 * *p)) {
                return Err(StoreError::WeilBound {
                    label: self.label.clone(),
                    p: *p,
                });
            }
        }
        Ok(())
    }
}
