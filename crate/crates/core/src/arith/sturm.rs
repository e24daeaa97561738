//! Exact real-root location with Sturm sequences.
//!
//! Used to check that a Hecke polynomial at `p` has all of its roots real and
//! inside `[-2√p, 2√p]`. Interval endpoints of the form `±√m` are handled
//! exactly by writing `P(±√m) = A ± B√m` with integers `A`, `B`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::IntPoly;

/// Divides out the positive content, keeping the sign.
fn drop_content(p: &IntPoly) -> IntPoly {
    let content = p.coeffs().iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() {
        return p.clone();
    }
    p.map(|c| c / &content)
}

/// Sign of `A + B√m` for `m >= 0`.
fn sign_quadratic(a: &BigInt, b: &BigInt, m: &BigInt) -> Ordering {
    let sa = a.cmp(&BigInt::zero());
    let sb = b.cmp(&BigInt::zero());
    if sb == Ordering::Equal || m.is_zero() {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // opposite signs: compare magnitudes
    let lhs = a * a;
    let rhs = b * b * m;
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `p(s·√m)` with `s = ±1`.
fn sign_at_sqrt(p: &IntPoly, m: &BigInt, negative: bool) -> Ordering {
    let mut a = BigInt::zero();
    let mut b = BigInt::zero();
    let mut mp = BigInt::one();
    for (i, c) in p.coeffs().iter().enumerate() {
        if i % 2 == 0 {
            a += c * &mp;
        } else {
            b += c * &mp;
            mp *= m;
        }
    }
    if negative {
        b = -b;
    }
    sign_quadratic(&a, &b, m)
}

fn sign_at_infinity(p: &IntPoly, negative: bool) -> Ordering {
    let Some(deg) = p.degree() else {
        return Ordering::Equal;
    };
    let s = p.leading().unwrap().cmp(&BigInt::zero());
    if negative && deg % 2 == 1 {
        s.reverse()
    } else {
        s
    }
}

fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut count = 0;
    let mut last = Ordering::Equal;
    for s in signs.filter(|s| *s != Ordering::Equal) {
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// A Sturm sequence built as a primitive pseudo-remainder sequence. Every
/// term is a positive multiple of the classical Sturm term, so sign
/// variations are unchanged.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    terms: Vec<IntPoly>,
}

impl SturmSequence {
    pub fn new(p: &IntPoly) -> Self {
        let mut terms = Vec::new();
        if p.is_zero() {
            return SturmSequence { terms };
        }
        terms.push(p.clone());
        let d = p.derivative();
        if d.is_zero() {
            return SturmSequence { terms };
        }
        terms.push(drop_content(&d));
        loop {
            let n = terms.len();
            let r = pseudo_rem(&terms[n - 2], &terms[n - 1]);
            if r.is_zero() {
                break;
            }
            terms.push(drop_content(&-&r));
        }
        SturmSequence { terms }
    }

    pub fn terms(&self) -> &[IntPoly] {
        &self.terms
    }

    pub fn variations_at_infinity(&self, negative: bool) -> usize {
        variations(self.terms.iter().map(|t| sign_at_infinity(t, negative)))
    }

    pub fn variations_at_sqrt(&self, m: &BigInt, negative: bool) -> usize {
        variations(self.terms.iter().map(|t| sign_at_sqrt(t, m, negative)))
    }

    pub fn variations_at(&self, x: &BigInt) -> usize {
        variations(self.terms.iter().map(|t| t.eval(x).cmp(&BigInt::zero())))
    }
}

/// Pseudo-remainder of `a` by `b`, scaled so that it is a positive multiple
/// of the true remainder.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.degree().expect("pseudo-remainder by zero");
    let lead = b.leading().unwrap().clone();
    let mut rem = a.coeffs().to_vec();
    if rem.len() <= db {
        return a.clone();
    }
    let mut steps = 0u32;
    for i in (db..rem.len()).rev() {
        let c = rem[i].clone();
        for r in rem.iter_mut().take(i + 1) {
            *r *= &lead;
        }
        steps += 1;
        if c.is_zero() {
            continue;
        }
        for (j, bc) in b.coeffs().iter().enumerate() {
            rem[i - db + j] -= &c * bc;
        }
    }
    rem.truncate(db);
    let out = Poly::new(rem);
    if lead.is_negative() && steps % 2 == 1 {
        -&out
    } else {
        out
    }
}

/// Distinct real roots of a polynomial relative to `[-√m, √m]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootCensus {
    pub real: usize,
    pub outside: usize,
}

/// Counts distinct real roots of `p`, and those strictly outside
/// `[-√m, √m]`. `p` must not vanish at `±√m`.
pub fn root_census(p: &IntPoly, m: &BigInt) -> RootCensus {
    census_of(&SturmSequence::new(p), m)
}

fn census_of(seq: &SturmSequence, m: &BigInt) -> RootCensus {
    let neg_inf = seq.variations_at_infinity(true);
    let pos_inf = seq.variations_at_infinity(false);
    let lo = seq.variations_at_sqrt(m, true);
    let hi = seq.variations_at_sqrt(m, false);
    RootCensus {
        real: neg_inf - pos_inf,
        outside: (neg_inf - lo) + (hi - pos_inf),
    }
}

/// Removes every power of the monic factor `f` from `p`.
fn strip_factor(mut p: IntPoly, f: &IntPoly) -> IntPoly {
    while p.degree() >= f.degree() {
        let (q, r) = p.div_rem(f);
        if !r.is_zero() {
            break;
        }
        p = q;
    }
    p
}

/// True when every complex root of `p` is real and lies in `[-√m, √m]`.
///
/// Repeated roots are allowed: the Sturm sequence of a non-squarefree
/// polynomial ends in `gcd(p, p')` and still counts distinct roots.
pub fn roots_within(p: &IntPoly, m: &BigInt) -> bool {
    assert!(!m.is_negative());
    let mut p = p.clone();
    let boundary = Poly::new(vec![-m.clone(), BigInt::zero(), BigInt::one()]);
    p = strip_factor(p, &boundary);
    let r = m.sqrt();
    if &r * &r == *m {
        p = strip_factor(p, &Poly::linear(r.clone()));
        p = strip_factor(p, &Poly::linear(-r));
    }
    let deg = match p.degree() {
        None | Some(0) => return true,
        Some(d) => d,
    };
    let seq = SturmSequence::new(&p);
    let gcd_deg = seq.terms.last().and_then(Poly::degree).unwrap_or(0);
    let census = census_of(&seq, m);
    census.real == deg - gcd_deg && census.outside == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ip(c: &[i64]) -> IntPoly {
        Poly::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    #[test]
    fn census_examples() {
        // roots 3 ± √5 ≈ 0.76, 5.24; bound 2√11 ≈ 6.63
        let c = ip(&[4, -6, 1]);
        assert_eq!(root_census(&c, &BigInt::from(44)), RootCensus { real: 2, outside: 0 });
        // bound 2√2 ≈ 2.83 excludes 5.24
        assert_eq!(root_census(&c, &BigInt::from(8)), RootCensus { real: 2, outside: 1 });
        // x^2 + 1 has no real roots
        assert_eq!(root_census(&ip(&[1, 0, 1]), &BigInt::from(8)).real, 0);
    }

    #[test]
    fn weil_checks() {
        assert!(roots_within(&ip(&[-5, 0, 1]), &BigInt::from(44)));
        assert!(!roots_within(&ip(&[1, 0, 1]), &BigInt::from(44)));
        assert!(!roots_within(&ip(&[-7, 1]), &BigInt::from(44)));
        // boundary roots ±√m are allowed
        assert!(roots_within(&ip(&[-8, 0, 1]), &BigInt::from(8)));
        assert!(roots_within(&ip(&[-4, 1]), &BigInt::from(16)));
        assert!(roots_within(&ip(&[-1, 1]).pow(3), &BigInt::from(8)));
    }

    proptest! {
        #[test]
        fn census_matches_known_roots(
            roots in proptest::collection::btree_set(-30i64..31, 1..7),
            m in 1i64..800,
        ) {
            let p = Poly::from_roots(roots.iter().map(|&r| BigInt::from(r)));
            let outside = roots.iter().filter(|&&r| r * r > m).count();
            let on_boundary = roots.iter().any(|&r| r * r == m);
            prop_assume!(!on_boundary);
            let census = root_census(&p, &BigInt::from(m));
            prop_assert_eq!(census.real, roots.len());
            prop_assert_eq!(census.outside, outside);
            prop_assert_eq!(roots_within(&p, &BigInt::from(m)), outside == 0);
            let squared = &p * &p;
            prop_assert_eq!(roots_within(&squared, &BigInt::from(m)), outside == 0);
        }
    }
}
