//! Multiplicities `m_f` in `Jac(X(n0,n_ns)/K) ~ ∏_f A_f^{m_f}`.
//!
//! For a newform `f` of level `d0·d_ns²` and a character `χ` of the
//! Atkin–Lehner group, the weight of `χ` is the product over prime powers
//! `p^e ‖ n` of
//!
//! * `1/2 + ε·χ(W_{p^e})/2` when `p | n_ns`,
//! * `(v+1)/2 + ε·χ(W_{p^e})·(1+(-1)^v)/4` when `p | n0`, with
//!   `v = val_p(n0/d0)`,
//!
//! where `ε` is the sign of `W_{p^e}` on `f`. Then `m_f` is the sum of the
//! weights over the characters trivial on `K`.

use std::sync::Arc;

use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::int::valuation;
use crate::curve::{k_perp, AlSubgroup, BorelCartanLevel, CurveError, QuotientCurve, SignCharacter};
use crate::newform::{NewformRecord, NewformStore, Sign, StoreError};

#[derive(Debug, Error)]
pub enum MultiplicityError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{label}: no Atkin-Lehner sign at p = {p}, and the formula needs one")]
    MissingEpsilon { label: String, p: u64 },
    #[error("{label}: multiplicity {value} is not a nonnegative integer")]
    NonIntegral { label: String, value: String },
}

/// How to obtain `ε` at a prime not dividing the level of the form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EpsilonPolicy {
    /// Use `al_extended`, else fail.
    Strict,
    /// Use `al_extended`, else `+1`.
    #[default]
    OldformPlusOne,
}

fn epsilon(
    f: &NewformRecord,
    p: u64,
    q: u64,
    policy: EpsilonPolicy,
) -> Result<Sign, MultiplicityError> {
    if let Some(s) = f.level_sign(p) {
        return Ok(s);
    }
    if let Some(s) = f.al_extended.get(&q) {
        return Ok(*s);
    }
    match policy {
        EpsilonPolicy::OldformPlusOne => Ok(Sign::Plus),
        EpsilonPolicy::Strict => Err(MultiplicityError::MissingEpsilon {
            label: f.label.clone(),
            p,
        }),
    }
}

/// Per-prime factors of the character weight of one form on one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterWeights {
    label: String,
    /// `factors[i] = [value at χ_i = +1, value at χ_i = -1]`
    factors: Vec<[Rational64; 2]>,
}

impl CharacterWeights {
    pub fn new(
        f: &NewformRecord,
        level: &BorelCartanLevel,
        policy: EpsilonPolicy,
    ) -> Result<Self, MultiplicityError> {
        let (d0, _) = level.split_level(f.level)?;
        let half = Rational64::new(1, 2);
        let quarter = Rational64::new(1, 4);
        let mut factors = Vec::with_capacity(level.r());
        for pp in level.prime_powers() {
            let (constant, eps_coeff) = if pp.nonsplit {
                (half, half)
            } else {
                let v = valuation(level.n0() / d0, pp.p) as i64;
                let even = if v % 2 == 0 { 2 } else { 0 };
                (Rational64::from(v + 1) * half, Rational64::from(even) * quarter)
            };
            let eps = if eps_coeff.is_zero() {
                Sign::Plus
            } else {
                epsilon(f, pp.p, pp.q, policy)?
            };
            let e = Rational64::from(eps.as_i64()) * eps_coeff;
            factors.push([constant + e, constant - e]);
        }
        Ok(CharacterWeights {
            label: f.label.clone(),
            factors,
        })
    }

    pub fn weight(&self, chi: &SignCharacter) -> Rational64 {
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| match chi.sign(i) {
                Sign::Plus => f[0],
                Sign::Minus => f[1],
            })
            .product()
    }

    /// Sum of the weights over all characters.
    pub fn total(&self) -> Rational64 {
        self.factors.iter().map(|f| f[0] + f[1]).product()
    }

    pub fn multiplicity(&self, k: &AlSubgroup) -> Result<u64, MultiplicityError> {
        let sum: Rational64 = k_perp(k).iter().map(|c| self.weight(c)).sum();
        if !sum.is_integer() || sum < Rational64::zero() {
            return Err(MultiplicityError::NonIntegral {
                label: self.label.clone(),
                value: sum.to_string(),
            });
        }
        Ok(sum.to_integer() as u64)
    }
}

/// `m_f` for one form and one quotient curve.
pub fn multiplicity(
    f: &NewformRecord,
    curve: &QuotientCurve,
    policy: EpsilonPolicy,
) -> Result<u64, MultiplicityError> {
    CharacterWeights::new(f, curve.level(), policy)?.multiplicity(curve.subgroup())
}

/// `∏_{p | n0} (val_p(n0/d0) + 1)`, the multiplicity for trivial `K`.
pub fn oldform_count(level: &BorelCartanLevel, d0: u64) -> u64 {
    level
        .prime_powers()
        .iter()
        .filter(|pp| !pp.nonsplit)
        .map(|pp| valuation(level.n0() / d0, pp.p) as u64 + 1)
        .product()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTerm {
    pub form: Arc<NewformRecord>,
    pub multiplicity: u64,
}

/// The factors `A_f^{m_f}` with `m_f > 0`, ordered by level then label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyDecomposition {
    pub curve: QuotientCurve,
    pub terms: Vec<DecompositionTerm>,
    /// Number of forms of relevant levels with `m_f = 0`.
    pub dropped: usize,
}

impl IsogenyDecomposition {
    /// `Σ m_f · dim A_f`.
    pub fn dimension(&self) -> u64 {
        self.terms
            .iter()
            .map(|t| t.multiplicity * t.form.dim as u64)
            .sum()
    }

    pub fn multiplicity_of(&self, label: &str) -> u64 {
        self.terms
            .iter()
            .find(|t| t.form.label == label)
            .map_or(0, |t| t.multiplicity)
    }
}

pub fn decompose(
    curve: &QuotientCurve,
    store: &NewformStore,
    policy: EpsilonPolicy,
) -> Result<IsogenyDecomposition, MultiplicityError> {
    let mut terms = Vec::new();
    let mut dropped = 0;
    for level in curve.level().relevant_levels() {
        for f in store.newforms_of_level(level)? {
            let m = multiplicity(f, curve, policy)?;
            if m == 0 {
                dropped += 1;
            } else {
                terms.push(DecompositionTerm {
                    form: Arc::clone(f),
                    multiplicity: m,
                });
            }
        }
    }
    log::debug!("{curve}: {} classes kept, {dropped} with m_f = 0", terms.len());
    Ok(IsogenyDecomposition {
        curve: curve.clone(),
        terms,
        dropped,
    })
}
