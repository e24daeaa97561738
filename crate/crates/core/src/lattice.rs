//! Integer combinations of quotient Jacobians for a `(Z/2Z)^r` action.
//!
//! For any subgroup `W`, `J_W` is isogenous to a formal integer combination
//! of the `J_{⟨S⟩}` with `S` running over subsets of a fixed basis `B`. The
//! same combination expresses genera and point counts of `X/W` through
//! those of the `X/⟨S⟩`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Neg};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::curve::AlSubgroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("s = {s} is out of range 0..={r}")]
    SOutOfRange { s: usize, r: usize },
    #[error("the given vectors are not a basis of (Z/2)^{r}")]
    NotABasis { r: usize },
    #[error("subgroup has rank {got}, data has r = {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("basis data has no value for subset {0:#b}")]
    MissingValue(u32),
    #[error("label {0:?} is not generated by basis vectors")]
    NotBasisGenerated(Vec<u32>),
    #[error("evaluated value {0} is negative")]
    Negative(String),
}

/// Finite formal sum `Σ c_H [H]` with nonzero integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalCombination {
    terms: BTreeMap<AlSubgroup, i64>,
}

impl FormalCombination {
    pub fn zero() -> Self {
        FormalCombination::default()
    }

    pub fn single(h: AlSubgroup) -> Self {
        let mut c = FormalCombination::zero();
        c.add_term(h, 1);
        c
    }

    pub fn add_term(&mut self, h: AlSubgroup, coeff: i64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(h) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        let mut out = FormalCombination::zero();
        for (h, v) in &self.terms {
            out.add_term(h.clone(), v * c);
        }
        out
    }

    pub fn coefficient(&self, h: &AlSubgroup) -> i64 {
        self.terms.get(h).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AlSubgroup, i64)> {
        self.terms.iter().map(|(h, c)| (h, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.terms.values().sum()
    }
}

impl Add for &FormalCombination {
    type Output = FormalCombination;

    fn add(self, rhs: &FormalCombination) -> FormalCombination {
        let mut out = self.clone();
        for (h, c) in &rhs.terms {
            out.add_term(h.clone(), *c);
        }
        out
    }
}

impl Neg for &FormalCombination {
    type Output = FormalCombination;

    fn neg(self) -> FormalCombination {
        self.scale(-1)
    }
}

/// Dimension shadow of `J × J_{⟨σ,τ⟩}² ~ J_σ × J_τ × J_{σ+τ}`.
pub fn base_case_relation(g_x: u64, g_s: u64, g_t: u64, g_st: u64, g_both: u64) -> bool {
    g_x + 2 * g_both == g_s + g_t + g_st
}

/// Expansion of `[K ∪ {b_1 + … + b_s}]` with `support = [b_1, …, b_s]`:
/// coefficient `(1 + (−1)^s)/2` on `[K]` and `(−1)^{|I|+s} 2^{|I|−1}` on
/// `[I ∪ K]` for each nonempty `I ⊆ support`.
pub fn expand_sum(k: &AlSubgroup, support: &[u32]) -> FormalCombination {
    let s = support.len();
    let mut out = FormalCombination::zero();
    if s.is_multiple_of(2) {
        out.add_term(k.clone(), 1);
    }
    for subset in 1u32..1 << s {
        let size = subset.count_ones() as usize;
        let sign = if (size + s).is_multiple_of(2) { 1 } else { -1 };
        let mut h = k.clone();
        for (j, b) in support.iter().enumerate() {
            if subset >> j & 1 == 1 {
                h = h.with(*b);
            }
        }
        out.add_term(h, sign << (size - 1));
    }
    out
}

/// [`expand_sum`] with the first `s` standard basis vectors.
pub fn expand_sum_element(r: usize, k: &AlSubgroup, s: usize) -> Result<FormalCombination, LatticeError> {
    if s > r {
        return Err(LatticeError::SOutOfRange { s, r });
    }
    if k.r() != r {
        return Err(LatticeError::RankMismatch {
            expected: r,
            got: k.r(),
        });
    }
    let support: Vec<u32> = (0..s).map(|i| 1 << i).collect();
    Ok(expand_sum(k, &support))
}

/// Coordinates of every vector with respect to `basis`.
fn coordinates(r: usize, basis: &[u32]) -> Result<HashMap<u32, u32>, LatticeError> {
    if basis.len() != r || AlSubgroup::generated(r, basis.iter().copied()).map(|g| g.rank()) != Ok(r) {
        return Err(LatticeError::NotABasis { r });
    }
    let mut coords = HashMap::with_capacity(1 << r);
    for mask in 0u32..1 << r {
        let v = basis
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .fold(0, |acc, (_, b)| acc ^ b);
        coords.insert(v, mask);
    }
    Ok(coords)
}

/// Rewrites `[W]` as a combination of `[⟨S⟩]`, `S ⊆ B`. Labels are returned
/// in `B`-coordinates: bit `j` stands for `b_{j+1}`.
pub fn reduce_to_basis(w: &AlSubgroup, basis: &[u32]) -> Result<FormalCombination, LatticeError> {
    let r = w.r();
    let coords = coordinates(r, basis)?;
    let pending: Vec<u32> = w.basis().iter().map(|v| coords[v]).collect();
    let mut out = FormalCombination::zero();
    expand_pending(r, &pending, 0, 1, &mut out);
    Ok(out)
}

/// Expands the last pending generator against the basis part `base`,
/// recursing until no generator is pending.
fn expand_pending(r: usize, pending: &[u32], base: u32, coeff: i64, out: &mut FormalCombination) {
    let Some((&w, rest)) = pending.split_last() else {
        let label = AlSubgroup::generated(r, (0..r).filter(|j| base >> j & 1 == 1).map(|j| 1 << j))
            .expect("basis mask within rank");
        out.add_term(label, coeff);
        return;
    };
    let w = w & !base;
    let support: Vec<u32> = (0..r as u32).filter(|j| w >> j & 1 == 1).collect();
    let s = support.len();
    if s == 0 {
        expand_pending(r, rest, base, coeff, out);
        return;
    }
    if s.is_multiple_of(2) {
        expand_pending(r, rest, base, coeff, out);
    }
    for subset in 1u32..1 << s {
        let size = subset.count_ones() as usize;
        let sign = if (size + s).is_multiple_of(2) { 1 } else { -1 };
        let extra = support
            .iter()
            .enumerate()
            .filter(|(i, _)| subset >> i & 1 == 1)
            .fold(0, |acc, (_, j)| acc | 1 << j);
        expand_pending(r, rest, base | extra, coeff * (sign << (size - 1)), out);
    }
}

/// Values of a genus or point count on the `2^r` subsets of a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisData {
    r: usize,
    basis: Vec<u32>,
    values: BTreeMap<u32, BigInt>,
}

impl BasisData {
    /// Data over the standard basis; `values[S]` for `S` a bitmask.
    pub fn standard(r: usize, values: BTreeMap<u32, BigInt>) -> Result<Self, LatticeError> {
        BasisData::with_basis((0..r).map(|i| 1 << i).collect(), values)
    }

    pub fn with_basis(basis: Vec<u32>, values: BTreeMap<u32, BigInt>) -> Result<Self, LatticeError> {
        let r = basis.len();
        coordinates(r, &basis)?;
        if let Some(m) = (0u32..1 << r).find(|m| !values.contains_key(m)) {
            return Err(LatticeError::MissingValue(m));
        }
        Ok(BasisData { r, basis, values })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn value(&self, subset: u32) -> Option<&BigInt> {
        self.values.get(&subset)
    }

    /// Evaluates a combination produced by [`reduce_to_basis`].
    pub fn evaluate(&self, comb: &FormalCombination) -> Result<BigInt, LatticeError> {
        let mut total = BigInt::zero();
        for (h, c) in comb.terms() {
            if h.basis().iter().any(|v| v.count_ones() != 1) {
                return Err(LatticeError::NotBasisGenerated(h.basis().to_vec()));
            }
            let mask = h.basis().iter().fold(0, |acc, v| acc | v);
            let v = self.values.get(&mask).ok_or(LatticeError::MissingValue(mask))?;
            total += v * c;
        }
        Ok(total)
    }

    fn evaluate_subgroup(&self, w: &AlSubgroup) -> Result<BigInt, LatticeError> {
        if w.r() != self.r {
            return Err(LatticeError::RankMismatch {
                expected: self.r,
                got: w.r(),
            });
        }
        let v = self.evaluate(&reduce_to_basis(w, &self.basis)?)?;
        if v.is_negative() {
            return Err(LatticeError::Negative(v.to_string()));
        }
        Ok(v)
    }
}

/// `g(X/W)` from the genera `g(X/⟨S⟩)`, `S ⊆ B`.
pub fn genus_from_basis(data: &BasisData, w: &AlSubgroup) -> Result<BigInt, LatticeError> {
    data.evaluate_subgroup(w)
}

/// `#(X/W)(F_q)` from the counts `#(X/⟨S⟩)(F_q)`, `S ⊆ B`.
pub fn points_from_basis(data: &BasisData, w: &AlSubgroup) -> Result<BigInt, LatticeError> {
    data.evaluate_subgroup(w)
}
