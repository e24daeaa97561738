use std::fmt;

use crate::newform::Sign;

use super::CurveError;

pub const MAX_ENUMERATION_RANK: usize = 12;

/// Lowest set bit, used as the pivot of a GF(2) row.
fn pivot(v: u32) -> u32 {
    v.trailing_zeros()
}

/// A subgroup of `(Z/2Z)^r`, stored as a reduced row echelon basis.
///
/// Bit `i` of a vector stands for the generator attached to the `i`-th
/// prime power. Rows are fully reduced (each pivot bit occurs in exactly one
/// row) and sorted by pivot, so equal subgroups have equal bases.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlSubgroup {
    r: usize,
    basis: Vec<u32>,
}

impl AlSubgroup {
    pub fn trivial(r: usize) -> Self {
        assert!(r <= 31, "rank {r} too large for a bitmask");
        AlSubgroup { r, basis: Vec::new() }
    }

    pub fn full(r: usize) -> Self {
        AlSubgroup::generated(r, (0..r).map(|i| 1u32 << i)).unwrap()
    }

    /// Subgroup generated by the given vectors.
    pub fn generated(r: usize, gens: impl IntoIterator<Item = u32>) -> Result<Self, CurveError> {
        let mut g = AlSubgroup::trivial(r);
        for v in gens {
            if r < 32 && v >> r != 0 {
                return Err(CurveError::VectorOutOfRange { vector: v, r });
            }
            g.insert(v);
        }
        Ok(g)
    }

    fn reduce(&self, mut v: u32) -> u32 {
        for row in &self.basis {
            if v & (1 << pivot(*row)) != 0 {
                v ^= row;
            }
        }
        v
    }

    fn insert(&mut self, v: u32) {
        let v = self.reduce(v);
        if v == 0 {
            return;
        }
        let bit = 1 << pivot(v);
        for row in self.basis.iter_mut() {
            if *row & bit != 0 {
                *row ^= v;
            }
        }
        self.basis.push(v);
        self.basis.sort_by_key(|row| pivot(*row));
    }

    pub fn with(&self, v: u32) -> Self {
        let mut g = self.clone();
        g.insert(v);
        g
    }

    pub fn join(&self, other: &AlSubgroup) -> Self {
        assert_eq!(self.r, other.r);
        let mut g = self.clone();
        for v in &other.basis {
            g.insert(*v);
        }
        g
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn order(&self) -> u64 {
        1 << self.rank()
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.reduce(v) == 0
    }

    pub fn is_subgroup_of(&self, other: &AlSubgroup) -> bool {
        self.basis.iter().all(|v| other.contains(*v))
    }

    /// All `2^rank` elements, ascending.
    pub fn elements(&self) -> Vec<u32> {
        let mut out = vec![0u32];
        for row in &self.basis {
            let more: Vec<u32> = out.iter().map(|e| e ^ row).collect();
            out.extend(more);
        }
        out.sort_unstable();
        out
    }
}

/// A character of `(Z/2Z)^r`; bit `i` of `minus` set means the `i`-th
/// generator maps to `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignCharacter {
    r: usize,
    minus: u32,
}

impl SignCharacter {
    pub fn new(r: usize, minus: u32) -> Self {
        SignCharacter { r, minus }
    }

    pub fn from_signs(signs: &[Sign]) -> Self {
        let minus = signs
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Sign::Minus)
            .fold(0, |acc, (i, _)| acc | 1 << i);
        SignCharacter { r: signs.len(), minus }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn minus_mask(&self) -> u32 {
        self.minus
    }

    /// Value on the `i`-th generator.
    pub fn sign(&self, i: usize) -> Sign {
        if self.minus >> i & 1 == 1 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn signs(&self) -> Vec<Sign> {
        (0..self.r).map(|i| self.sign(i)).collect()
    }

    /// Value on an arbitrary element, extended multiplicatively.
    pub fn eval(&self, v: u32) -> Sign {
        if (self.minus & v).count_ones().is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn is_trivial_on(&self, k: &AlSubgroup) -> bool {
        k.basis().iter().all(|v| self.eval(*v) == Sign::Plus)
    }

    /// Sort key putting sign vectors in lexicographic order, `+` first.
    fn lex_key(&self) -> u32 {
        (0..self.r).fold(0, |acc, i| acc << 1 | (self.minus >> i & 1))
    }
}

impl fmt::Display for SignCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.signs().iter().map(Sign::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// The characters trivial on `k`, in lexicographic order of sign vectors.
pub fn k_perp(k: &AlSubgroup) -> Vec<SignCharacter> {
    let r = k.r();
    let mut out: Vec<SignCharacter> = (0..1u32 << r)
        .map(|m| SignCharacter::new(r, m))
        .filter(|c| c.is_trivial_on(k))
        .collect();
    out.sort_by_key(SignCharacter::lex_key);
    out
}

/// Every subgroup of `(Z/2Z)^r` exactly once, in canonical order.
pub fn enumerate_subgroups(r: usize) -> Result<Vec<AlSubgroup>, CurveError> {
    if r > MAX_ENUMERATION_RANK {
        return Err(CurveError::RankTooLarge {
            r,
            max: MAX_ENUMERATION_RANK,
        });
    }
    let mut out = Vec::new();
    for pivots in 0..1u32 << r {
        // free positions of the row with pivot i: non-pivot bits above i
        let rows: Vec<(u32, Vec<u32>)> = (0..r as u32)
            .filter(|i| pivots >> i & 1 == 1)
            .map(|i| {
                let free = (i + 1..r as u32).filter(|j| pivots >> j & 1 == 0).collect();
                (i, free)
            })
            .collect();
        let total_free: usize = rows.iter().map(|(_, f)| f.len()).sum();
        for fill in 0..1u64 << total_free {
            let mut bit = 0;
            let mut basis = Vec::with_capacity(rows.len());
            for (p, free) in &rows {
                let mut row = 1u32 << p;
                for j in free {
                    if fill >> bit & 1 == 1 {
                        row |= 1 << j;
                    }
                    bit += 1;
                }
                basis.push(row);
            }
            out.push(AlSubgroup { r, basis });
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_is_canonical() {
        let a = AlSubgroup::generated(3, [0b011, 0b100]).unwrap();
        let b = AlSubgroup::generated(3, [0b111, 0b100, 0b011]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[0b011, 0b100]);
        let c = AlSubgroup::generated(3, [0b010, 0b101]).unwrap();
        assert_eq!(c.basis(), &[0b101, 0b010]);
        assert_eq!(c.elements(), vec![0, 0b010, 0b101, 0b111]);
    }

    #[test]
    fn perp_order() {
        let k = AlSubgroup::generated(3, [0b011, 0b100]).unwrap();
        let perp: Vec<String> = k_perp(&k).iter().map(|c| c.to_string()).collect();
        assert_eq!(perp, vec!["(+,+,+)", "(-,-,+)"]);
        let all: Vec<String> = k_perp(&AlSubgroup::trivial(2)).iter().map(|c| c.to_string()).collect();
        assert_eq!(all, vec!["(+,+)", "(+,-)", "(-,+)", "(-,-)"]);
        assert_eq!(k_perp(&AlSubgroup::trivial(0)).len(), 1);
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<usize> = (0..=5).map(|r| enumerate_subgroups(r).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16, 67, 374]);
        assert!(enumerate_subgroups(13).is_err());
    }
}
