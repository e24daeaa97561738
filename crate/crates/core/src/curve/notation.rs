//! The compact curve notation `(n0,n_ns){i,j;k;...}`: each `;`-separated
//! group lists 1-based indices of prime powers whose product is one
//! generator.

use super::{AlSubgroup, BorelCartanLevel, CurveError, QuotientCurve};

fn syntax(text: &str, reason: &str) -> CurveError {
    CurveError::Syntax {
        text: text.to_string(),
        reason: reason.to_string(),
    }
}

fn number(text: &str, part: &str) -> Result<u64, CurveError> {
    part.parse()
        .map_err(|_| syntax(text, &format!("{part:?} is not a positive integer")))
}

/// Parses the notation. Whitespace and TeX backslashes are ignored, so
/// strings copied from typeset tables are accepted.
pub fn parse_table_notation(text: &str) -> Result<QuotientCurve, CurveError> {
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '\\')
        .collect();
    let rest = s
        .strip_prefix('(')
        .ok_or_else(|| syntax(text, "expected '('"))?;
    let (pair, rest) = rest
        .split_once(')')
        .ok_or_else(|| syntax(text, "expected ')'"))?;
    let (a, b) = pair
        .split_once(',')
        .ok_or_else(|| syntax(text, "expected \"n0,n_ns\""))?;
    let level = BorelCartanLevel::new(number(text, a)?, number(text, b)?)?;
    let body = rest
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| syntax(text, "expected '{...}' after the level"))?;

    let r = level.r();
    let mut gens = Vec::new();
    if !body.is_empty() {
        for group in body.split(';') {
            if group.is_empty() {
                return Err(syntax(text, "empty generator"));
            }
            let mut v = 0u32;
            for idx in group.split(',') {
                let i = number(text, idx)? as usize;
                if i == 0 || i > r {
                    return Err(CurveError::IndexOutOfRange { index: i, r });
                }
                if v >> (i - 1) & 1 == 1 {
                    return Err(syntax(text, &format!("index {i} repeated in one generator")));
                }
                v |= 1 << (i - 1);
            }
            gens.push(v);
        }
    }
    QuotientCurve::new(level.clone(), AlSubgroup::generated(r, gens)?)
}

/// Formats with the canonical generators of the subgroup.
pub fn format_table_notation(c: &QuotientCurve) -> String {
    let groups: Vec<String> = c
        .subgroup()
        .basis()
        .iter()
        .map(|v| {
            (0..c.level().r())
                .filter(|i| v >> i & 1 == 1)
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    format!(
        "({},{}){{{}}}",
        c.level().n0(),
        c.level().n_ns(),
        groups.join(";")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn appendix_examples() {
        let c = parse_table_notation("(945,1){2;1,3}").unwrap();
        let mut gens = c.generator_divisors();
        gens.sort_unstable();
        assert_eq!(gens, vec![5, 189]);

        let c = parse_table_notation("(418,3){2;1,3;3,4}").unwrap();
        let expected = QuotientCurve::from_divisors(418, 3, &[3, 22, 209]).unwrap();
        assert_eq!(c, expected);

        let c = parse_table_notation("(6,7){}").unwrap();
        assert!(c.subgroup().is_trivial());
        assert_eq!(format_table_notation(&c), "(6,7){}");
    }

    #[test]
    fn typeset_input() {
        let c = parse_table_notation("(6, 7)\\{ 3;1,2 \\}").unwrap();
        assert_eq!(c.to_string(), "(6,7){1,2;3}");
        assert_eq!(c, QuotientCurve::from_divisors(6, 7, &[6, 7]).unwrap());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_table_notation("(6,7){4}"),
            Err(CurveError::IndexOutOfRange { index: 4, r: 3 })
        ));
        assert!(matches!(parse_table_notation("(6,7"), Err(CurveError::Syntax { .. })));
        assert!(matches!(parse_table_notation("(6,7){1;}"), Err(CurveError::Syntax { .. })));
        assert!(matches!(
            parse_table_notation("(6,3){1}"),
            Err(CurveError::NotCoprime { .. })
        ));
    }
}
