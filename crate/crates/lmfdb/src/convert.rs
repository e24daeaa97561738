//! Turns API rows into newform records.
//!
//! For a form of dimension `d > 1` the eigenvalue `a_p` arrives as a
//! vector over the Hecke ring basis `β_i = (Σ_j num[i][j] ν^j) / den[i]`,
//! where `ν` is a root of `field_poly`. `C_p` is the characteristic
//! polynomial of multiplication by `a_p` on `Q(ν)`, and must have trace
//! equal to the published trace of `a_p`.

use std::collections::BTreeMap;

use mcpoint_core::arith::int::{factorize, is_prime};
use mcpoint_core::arith::{Matrix, Poly};
use mcpoint_core::newform::{NewformRecord, Sign};
use mcpoint_core::{IntPoly, RatPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::FetchError;

fn malformed(label: &str, reason: impl Into<String>) -> FetchError {
    FetchError::Malformed {
        url: label.to_string(),
        reason: reason.into(),
    }
}

fn int(v: &Value, label: &str, what: &str) -> Result<BigInt, FetchError> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse()
            .map_err(|_| malformed(label, format!("{what}: {n} is not an integer"))),
        _ => Err(malformed(label, format!("{what}: expected an integer"))),
    }
}

fn u64_field(row: &Value, key: &str, label: &str) -> Result<u64, FetchError> {
    row.get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed(label, format!("missing {key}")))
}

fn int_list(v: Option<&Value>, label: &str, what: &str) -> Result<Vec<BigInt>, FetchError> {
    v.and_then(Value::as_array)
        .ok_or_else(|| malformed(label, format!("missing {what}")))?
        .iter()
        .map(|x| int(x, label, what))
        .collect()
}

fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|p| is_prime(*p)).collect()
}

/// Label of an `mf_newforms` row.
pub fn row_label(row: &Value) -> Result<String, FetchError> {
    row.get("label")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| malformed("mf_newforms", "row without label"))
}

/// Builds one record from an `mf_newforms` row and, for `d > 1`, the
/// matching `mf_hecke_nf` row.
pub fn record_from_rows(
    newform: &Value,
    hecke_nf: Option<&Value>,
    primes: &[u64],
) -> Result<NewformRecord, FetchError> {
    let label = row_label(newform)?;
    let level = u64_field(newform, "level", &label)?;
    let dim = u64_field(newform, "dim", &label)? as usize;

    let mut al_signs = BTreeMap::new();
    let al = newform
        .get("atkin_lehner_eigenvals")
        .and_then(Value::as_array)
        .ok_or_else(|| FetchError::MissingAlData { label: label.clone() })?;
    let factors: BTreeMap<u64, u32> = factorize(level).into_iter().collect();
    for pair in al {
        let pair = pair.as_array().filter(|a| a.len() == 2);
        let (p, s) = match pair {
            Some(a) => (a[0].as_u64(), a[1].as_i64().and_then(Sign::from_i64)),
            None => (None, None),
        };
        let (Some(p), Some(s)) = (p, s) else {
            return Err(malformed(&label, "bad atkin_lehner_eigenvals entry"));
        };
        let e = *factors
            .get(&p)
            .ok_or_else(|| malformed(&label, format!("AL sign at {p}, which does not divide the level")))?;
        al_signs.insert(p.pow(e), s);
    }
    if al_signs.len() != factors.len() {
        return Err(FetchError::MissingAlData { label });
    }

    let traces = int_list(newform.get("traces"), &label, "traces")?;
    if traces.first() != Some(&BigInt::from(dim)) {
        return Err(FetchError::InconsistentDimension {
            label,
            expected: dim,
            got: traces.first().map(|t| t.to_string()).unwrap_or_default(),
        });
    }

    let mut hecke_charpolys = BTreeMap::new();
    let field = match (dim, hecke_nf) {
        (1, _) => None,
        (_, Some(nf)) => Some(HeckeField::from_row(nf, &label, dim)?),
        (_, None) => return Err(FetchError::MissingEigenvalues { label, p: primes.first().copied().unwrap_or(2) }),
    };
    for &p in primes {
        if level % p == 0 {
            continue;
        }
        let trace = traces
            .get(p as usize - 1)
            .ok_or_else(|| FetchError::MissingEigenvalues { label: label.clone(), p })?;
        let c = match &field {
            None => Poly::linear(trace.clone()),
            Some(f) => f.charpoly_of_ap(p, &label)?,
        };
        let c_trace = -c.coeff(dim - 1);
        if &c_trace != trace {
            return Err(FetchError::TraceMismatch {
                label,
                p,
                charpoly_trace: c_trace.to_string(),
                published: trace.to_string(),
            });
        }
        hecke_charpolys.insert(p, c);
    }

    let rec = NewformRecord {
        label,
        level,
        dim,
        al_signs,
        al_extended: BTreeMap::new(),
        hecke_charpolys,
    };
    rec.validate()?;
    Ok(rec)
}

/// `Q(ν)` with the Hecke ring basis and the `a_p` vectors of one form.
struct HeckeField {
    modulus: RatPoly,
    basis: Vec<RatPoly>,
    ap: Vec<Vec<BigInt>>,
    maxp: u64,
}

impl HeckeField {
    fn from_row(nf: &Value, label: &str, dim: usize) -> Result<Self, FetchError> {
        let field_poly = int_list(nf.get("field_poly"), label, "field_poly")?;
        if field_poly.len() != dim + 1 || !field_poly[dim].is_one() {
            return Err(FetchError::InconsistentDimension {
                label: label.to_string(),
                expected: dim,
                got: format!("field_poly of length {}", field_poly.len()),
            });
        }
        if nf
            .get("hecke_ring_cyclotomic_generator")
            .and_then(Value::as_u64)
            .is_some_and(|g| g != 0)
        {
            return Err(malformed(label, "cyclotomic Hecke ring representation is not supported"));
        }
        let to_rat = |v: &[BigInt]| -> RatPoly { Poly::new(v.iter().map(|c| BigRational::from(c.clone())).collect()) };
        let modulus = to_rat(&field_poly);
        let power_basis = nf.get("hecke_ring_power_basis").and_then(Value::as_bool).unwrap_or(false);
        let basis = if power_basis || nf.get("hecke_ring_numerators").is_none_or(Value::is_null) {
            (0..dim).map(|j| Poly::monomial(BigRational::one(), j)).collect()
        } else {
            let nums = nf
                .get("hecke_ring_numerators")
                .and_then(Value::as_array)
                .ok_or_else(|| malformed(label, "bad hecke_ring_numerators"))?;
            let dens = int_list(nf.get("hecke_ring_denominators"), label, "hecke_ring_denominators")?;
            if nums.len() != dim || dens.len() != dim {
                return Err(FetchError::InconsistentDimension {
                    label: label.to_string(),
                    expected: dim,
                    got: format!("Hecke ring basis of size {}", nums.len()),
                });
            }
            nums.iter()
                .zip(&dens)
                .map(|(n, d)| {
                    if d.is_zero() {
                        return Err(malformed(label, "zero Hecke ring denominator"));
                    }
                    let n = int_list(Some(n), label, "hecke_ring_numerators")?;
                    Ok(Poly::new(
                        n.into_iter()
                            .map(|c| BigRational::new(c, d.clone()))
                            .collect(),
                    ))
                })
                .collect::<Result<_, _>>()?
        };
        let ap = nf
            .get("ap")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed(label, "missing ap"))?
            .iter()
            .map(|v| int_list(Some(v), label, "ap"))
            .collect::<Result<Vec<_>, _>>()?;
        if ap.iter().any(|v| v.len() != dim) {
            return Err(FetchError::InconsistentDimension {
                label: label.to_string(),
                expected: dim,
                got: "ap vector of another length".into(),
            });
        }
        let maxp = nf.get("maxp").and_then(Value::as_u64).unwrap_or(u64::MAX);
        Ok(HeckeField {
            modulus,
            basis,
            ap,
            maxp,
        })
    }

    fn charpoly_of_ap(&self, p: u64, label: &str) -> Result<IntPoly, FetchError> {
        let missing = || FetchError::MissingEigenvalues {
            label: label.to_string(),
            p,
        };
        if p > self.maxp {
            return Err(missing());
        }
        let idx = primes_upto(p).len() - 1;
        let v = self.ap.get(idx).ok_or_else(missing)?;
        let mut a = RatPoly::zero();
        for (c, b) in v.iter().zip(&self.basis) {
            a = &a + &b.scale(&BigRational::from(c.clone()));
        }
        let d = self.basis.len();
        // row j holds the power-basis coordinates of a·ν^j
        let rows: Vec<Vec<BigRational>> = (0..d)
            .map(|j| {
                let prod = &a * &Poly::monomial(BigRational::one(), j);
                let (_, r) = prod.div_rem(&self.modulus);
                (0..d).map(|i| r.coeff(i)).collect()
            })
            .collect();
        let cp = Matrix::from_rows(rows).charpoly();
        let coeffs = cp
            .coeffs()
            .iter()
            .map(|c| {
                c.is_integer()
                    .then(|| c.to_integer())
                    .ok_or_else(|| malformed(label, format!("non-integral charpoly of a_{p}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rational_form() {
        let traces: Vec<i64> = vec![1, -1, -2, 1, 0, 2, 1, -1, 1, 0, 0, -2, -4];
        let row = json!({"label": "14.2.a.a", "level": 14, "dim": 1,
            "atkin_lehner_eigenvals": [[2, 1], [7, -1]], "traces": traces});
        let rec = record_from_rows(&row, None, &[3, 7, 11, 13]).unwrap();
        assert_eq!(rec.al_signs[&2], Sign::Plus);
        assert_eq!(rec.al_signs[&7], Sign::Minus);
        assert_eq!(rec.charpoly(3).unwrap(), &Poly::linear(BigInt::from(-2)));
        assert!(rec.charpoly(7).is_none());
        assert_eq!(rec.charpoly(13).unwrap(), &Poly::linear(BigInt::from(-4)));
    }

    #[test]
    fn quadratic_form_with_hecke_ring_basis() {
        // 67.2.a.b: a_p ∈ Z[(1+√5)/2]
        let row = json!({"label": "67.2.a.b", "level": 67, "dim": 2,
            "atkin_lehner_eigenvals": [[67, 1]], "traces": [2, -3, -3]});
        // ν = √5 root of x^2 - 5; β = (1, (1+ν)/2); a_2 = -2 + β1·1 → trace -3
        let nf = json!({"field_poly": [-5, 0, 1], "hecke_ring_power_basis": false,
            "hecke_ring_numerators": [[1, 0], [1, 1]], "hecke_ring_denominators": [1, 2],
            "hecke_ring_cyclotomic_generator": 0,
            "ap": [[-2, 1], [-2, 1]], "maxp": 3});
        let rec = record_from_rows(&row, Some(&nf), &[2, 3]).unwrap();
        let c2 = rec.charpoly(2).unwrap();
        assert_eq!(c2.coeffs(), &[BigInt::from(1), BigInt::from(3), BigInt::from(1)]);
        assert!(matches!(
            record_from_rows(&row, Some(&nf), &[5]),
            Err(FetchError::MissingEigenvalues { p: 5, .. })
        ));
    }

    #[test]
    fn trace_cross_check() {
        let row = json!({"label": "67.2.a.b", "level": 67, "dim": 2,
            "atkin_lehner_eigenvals": [[67, 1]], "traces": [2, -2]});
        let nf = json!({"field_poly": [-5, 0, 1], "hecke_ring_power_basis": false,
            "hecke_ring_numerators": [[1, 0], [1, 1]], "hecke_ring_denominators": [1, 2],
            "ap": [[-2, 1]], "maxp": 2});
        assert!(matches!(
            record_from_rows(&row, Some(&nf), &[2]),
            Err(FetchError::TraceMismatch { p: 2, .. })
        ));
    }

    #[test]
    fn missing_al_sign() {
        let row = json!({"label": "14.2.a.a", "level": 14, "dim": 1,
            "atkin_lehner_eigenvals": [[2, 1]], "traces": [1, -1, -2]});
        assert!(matches!(record_from_rows(&row, None, &[3]), Err(FetchError::MissingAlData { .. })));
    }
}
