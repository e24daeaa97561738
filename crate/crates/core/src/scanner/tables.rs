//! Summary tables built from scan rows.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;
use std::path::Path;

use num_bigint::BigInt;

use crate::curve::QuotientCurve;
use crate::multiplicity::{decompose, EpsilonPolicy};
use crate::newform::NewformStore;
use crate::points::{real_weil_poly_of_curve, FieldSize, NiceThreshold};
use crate::IntPoly;

use super::{sort_rows, ScanError, ScanRow};

/// Known upper bounds `M_g(q)` on the number of points of genus-`g`
/// curves over `F_q`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UpperBounds {
    bounds: BTreeMap<(u64, FieldSize), BigInt>,
}

impl UpperBounds {
    pub fn new() -> Self {
        UpperBounds::default()
    }

    pub fn insert(&mut self, genus: u64, q: FieldSize, bound: BigInt) {
        self.bounds.insert((genus, q), bound);
    }

    pub fn get(&self, genus: u64, q: FieldSize) -> Option<&BigInt> {
        self.bounds.get(&(genus, q))
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// Parses CSV text with header `genus,q,bound`; `q` is `p^k` or a
    /// prime power.
    pub fn parse_csv(text: &str, origin: &Path) -> Result<Self, ScanError> {
        let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = rd.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["genus", "q", "bound"] {
            return Err(ScanError::Parse {
                path: origin.to_path_buf(),
                line: 1,
                reason: "expected header genus,q,bound".into(),
            });
        }
        let mut out = UpperBounds::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let bad = |reason: String| ScanError::Parse {
                path: origin.to_path_buf(),
                line: i + 2,
                reason,
            };
            let genus: u64 = rec[0].parse().map_err(|_| bad(format!("bad genus {:?}", &rec[0])))?;
            let q: FieldSize = rec[1].parse().map_err(|e: crate::points::PointError| bad(e.to_string()))?;
            let bound: BigInt = rec[2].parse().map_err(|_| bad(format!("bad bound {:?}", &rec[2])))?;
            if bound < q.q() + 1u32 {
                return Err(bad(format!("bound {bound} is below q + 1")));
            }
            out.insert(genus, q, bound);
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self, ScanError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScanError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        UpperBounds::parse_csv(&text, path)
    }
}

/// The best count for one `(g, q)` and the first curve attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestEntry {
    pub genus: u64,
    pub q: FieldSize,
    pub count: BigInt,
    pub witness: QuotientCurve,
}

impl BestEntry {
    /// `g | q | n0,n_ns | k's | count`, with the generators written as
    /// exact divisors of `n`.
    pub fn table_line(&self) -> String {
        let l = self.witness.level();
        let ks: Vec<String> = self
            .witness
            .generator_divisors()
            .iter()
            .map(u64::to_string)
            .collect();
        format!(
            "{} | {} | {},{} | {} | {}",
            self.genus,
            self.q,
            l.n0(),
            l.n_ns(),
            ks.join(","),
            self.count
        )
    }
}

/// Maximum count per `(g, q)` over rows with `g` in `genus_range` and `q`
/// in `q_set` (all fields when `None`). Ties go to the first row in scan
/// order; pairs without rows are absent.
pub fn best_table(
    rows: &[ScanRow],
    genus_range: RangeInclusive<u64>,
    q_set: Option<&BTreeSet<FieldSize>>,
) -> Vec<BestEntry> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut best: BTreeMap<(u64, FieldSize), BestEntry> = BTreeMap::new();
    for r in sorted {
        if !genus_range.contains(&r.genus) || q_set.is_some_and(|s| !s.contains(&r.q)) {
            continue;
        }
        let better = best
            .get(&(r.genus, r.q))
            .is_none_or(|b| r.count > b.count);
        if better {
            best.insert(
                (r.genus, r.q),
                BestEntry {
                    genus: r.genus,
                    q: r.q,
                    count: r.count,
                    witness: r.curve,
                },
            );
        }
    }
    best.into_values().collect()
}

/// A best entry that is a "nice record" against a known bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordEntry {
    pub entry: BestEntry,
    pub bound: BigInt,
}

/// Best entries whose count is at least `q + 1 + (M − q − 1)/√2` for the
/// supplied bound `M = M_g(q)`. Entries without a bound are left out.
pub fn record_table(best: &[BestEntry], bounds: &UpperBounds) -> Result<Vec<RecordEntry>, ScanError> {
    let mut out = Vec::new();
    for e in best {
        let Some(m) = bounds.get(e.genus, e.q) else { continue };
        if NiceThreshold::new(e.q, m.clone())?.is_nice(&e.count) {
            out.push(RecordEntry {
                entry: e.clone(),
                bound: m.clone(),
            });
        }
    }
    Ok(out)
}

/// Maximal curves sharing `(g, q, h_W)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalGroup {
    pub genus: u64,
    pub q: FieldSize,
    pub count: BigInt,
    pub h_w: IntPoly,
    pub curves: Vec<QuotientCurve>,
}

/// `[c0,c1,...,cd]`, ascending powers.
pub fn format_coeffs(p: &IntPoly) -> String {
    let cs: Vec<String> = p.coeffs().iter().map(BigInt::to_string).collect();
    format!("[{}]", cs.join(","))
}

/// Rows of genus at least 2 that attain the Hasse–Weil–Serre bound, or the
/// supplied bound `M_g(q)` when there is one, grouped by their real Weil
/// polynomial.
pub fn maximal_table(
    rows: &[ScanRow],
    store: &NewformStore,
    policy: EpsilonPolicy,
    bounds: &UpperBounds,
) -> Result<Vec<MaximalGroup>, ScanError> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut decs = HashMap::new();
    let mut groups: BTreeMap<(u64, FieldSize, Vec<BigInt>), MaximalGroup> = BTreeMap::new();
    for r in sorted {
        let attains_bound = bounds.get(r.genus, r.q) == Some(&r.count);
        if r.genus < 2 || !(r.maximal || attains_bound) {
            continue;
        }
        if !decs.contains_key(&r.curve) {
            let d = decompose(&r.curve, store, policy)?;
            decs.insert(r.curve.clone(), d);
        }
        let h = real_weil_poly_of_curve(&decs[&r.curve], r.q)?;
        groups
            .entry((r.genus, r.q, h.coeffs().to_vec()))
            .or_insert_with(|| MaximalGroup {
                genus: r.genus,
                q: r.q,
                count: r.count.clone(),
                h_w: h,
                curves: Vec::new(),
            })
            .curves
            .push(r.curve);
    }
    Ok(groups.into_values().collect())
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ScanError + '_ {
    move |source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_best_csv(path: &Path, best: &[BestEntry]) -> Result<(), ScanError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["genus", "q", "count", "curve"])?;
    for e in best {
        w.write_record([
            e.genus.to_string(),
            e.q.to_string(),
            e.count.to_string(),
            e.witness.to_string(),
        ])?;
    }
    w.flush().map_err(io(path))
}

pub fn write_record_csv(path: &Path, records: &[RecordEntry]) -> Result<(), ScanError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["genus", "q", "count", "bound", "curve", "generators"])?;
    for r in records {
        let ks: Vec<String> = r.entry.witness.generator_divisors().iter().map(u64::to_string).collect();
        w.write_record([
            r.entry.genus.to_string(),
            r.entry.q.to_string(),
            r.entry.count.to_string(),
            r.bound.to_string(),
            r.entry.witness.to_string(),
            ks.join(" "),
        ])?;
    }
    w.flush().map_err(io(path))
}

pub fn write_maximal_csv(path: &Path, groups: &[MaximalGroup]) -> Result<(), ScanError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["genus", "q", "count", "h_w", "curves"])?;
    for g in groups {
        let curves: Vec<String> = g.curves.iter().map(QuotientCurve::to_string).collect();
        w.write_record([
            g.genus.to_string(),
            g.q.to_string(),
            g.count.to_string(),
            format_coeffs(&g.h_w),
            curves.join(" "),
        ])?;
    }
    w.flush().map_err(io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(curve: &str, genus: u64, q: &str, count: i64) -> ScanRow {
        let q: FieldSize = q.parse().unwrap();
        let count = BigInt::from(count);
        ScanRow {
            curve: curve.parse().unwrap(),
            genus,
            maximal: count == crate::points::hws_bound(genus, q),
            q,
            count,
        }
    }

    #[test]
    fn best_picks_max_and_first_on_ties() {
        let rows = vec![
            row("(6,7){2;3}", 7, "11^5", 166589),
            row("(6,7){1,2;3}", 7, "11^5", 166666),
            row("(6,7){1}", 2, "11", 20),
            row("(5,7){1}", 2, "11", 20),
        ];
        let best = best_table(&rows, 0..=50, None);
        assert_eq!(best.len(), 2);
        assert_eq!(best[0].witness.to_string(), "(5,7){1}");
        assert_eq!(best[1].count, BigInt::from(166666));
        assert_eq!(best[1].table_line(), "7 | 11^5 | 6,7 | 6,7 | 166666");
        assert!(best_table(&rows, 3..=6, None).is_empty());
        let only: BTreeSet<FieldSize> = ["11".parse().unwrap()].into();
        assert_eq!(best_table(&rows, 0..=50, Some(&only)).len(), 1);
    }

    #[test]
    fn records_need_bounds() {
        let best = best_table(&[row("(6,7){1,2;3}", 7, "11^5", 166666)], 0..=50, None);
        assert!(record_table(&best, &UpperBounds::new()).unwrap().is_empty());
        let mut b = UpperBounds::new();
        b.insert(7, "11^5".parse().unwrap(), BigInt::from(166666));
        assert_eq!(record_table(&best, &b).unwrap().len(), 1);
    }

    #[test]
    fn bounds_csv() {
        let b = UpperBounds::parse_csv("genus,q,bound\n2,2,6\n7, 11^5 ,166666\n", Path::new("b.csv")).unwrap();
        assert_eq!(b.get(2, "2".parse().unwrap()), Some(&BigInt::from(6)));
        assert_eq!(b.len(), 2);
        assert!(UpperBounds::parse_csv("g,q,b\n", Path::new("b.csv")).is_err());
        assert!(UpperBounds::parse_csv("genus,q,bound\n2,2,1\n", Path::new("b.csv")).is_err());
        assert!(UpperBounds::parse_csv("genus,q,bound\n2,6,9\n", Path::new("b.csv")).is_err());
    }

    #[test]
    fn coeff_format() {
        let p = IntPoly::new(vec![1.into(), 3.into(), 1.into()]);
        assert_eq!(format_coeffs(&p), "[1,3,1]");
    }
}
