//! Batch enumeration of quotient curves `X(n0, n_ns)/K` over a range of
//! levels and finite fields.
//!
//! Work is split by level pair. Every pair's result is appended to a
//! checksummed journal as soon as it is done, so an interrupted scan
//! resumes where it stopped. The final CSV is sorted by
//! `(n0, n_ns, subgroup, p, k)` and does not depend on the thread count.

mod config;
mod journal;
mod tables;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::int::gcd;
use crate::arith::PowerSumTable;
use crate::curve::{enumerate_subgroups, BorelCartanLevel, QuotientCurve, MAX_ENUMERATION_RANK};
use crate::multiplicity::{CharacterWeights, EpsilonPolicy, MultiplicityError};
use crate::newform::{NewformRecord, NewformStore, StoreError};
use crate::points::{count_from_trace, FieldSize, PointError};

pub use config::ScanConfig;
pub use tables::{
    best_table, format_coeffs, maximal_table, record_table, write_best_csv, write_maximal_csv,
    write_record_csv, BestEntry, MaximalGroup, RecordEntry, UpperBounds,
};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid scan config: {0}")]
    Config(String),
    #[error("{}: line {line}: {reason}", path.display())]
    Parse { path: PathBuf, line: usize, reason: String },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Multiplicity(#[from] MultiplicityError),
    #[error(transparent)]
    Points(#[from] PointError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// One computed `(curve, q)` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub curve: QuotientCurve,
    pub genus: u64,
    pub q: FieldSize,
    pub count: BigInt,
    /// `count` equals the Hasse–Weil–Serre bound.
    pub maximal: bool,
}

impl ScanRow {
    fn sort_key(&self) -> (u64, u64, &crate::curve::AlSubgroup, FieldSize) {
        let l = self.curve.level();
        (l.n0(), l.n_ns(), self.curve.subgroup(), self.q)
    }
}

pub fn sort_rows(rows: &mut [ScanRow]) {
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// A level pair, or one prime for a level pair, that was not scanned.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkipRecord {
    pub n0: u64,
    pub n_ns: u64,
    pub p: Option<u64>,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairOutcome {
    pub rows: Vec<ScanRow>,
    pub skips: Vec<SkipRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScanOutcome {
    pub rows: Vec<ScanRow>,
    pub skips: Vec<SkipRecord>,
    /// Pairs computed in this run.
    pub computed: usize,
    /// Pairs taken from the journal.
    pub resumed: usize,
}

/// `S_k` tables shared across level pairs, keyed by `(label, p)`.
#[derive(Default)]
pub struct PowerSumCache {
    tables: RwLock<HashMap<(String, u64), Arc<PowerSumTable>>>,
}

impl PowerSumCache {
    pub fn get(&self, f: &NewformRecord, p: u64, max_k: u32) -> Result<Arc<PowerSumTable>, PointError> {
        let key = (f.label.clone(), p);
        if let Some(t) = self.tables.read().expect("cache lock").get(&key) {
            if t.max_k() >= max_k {
                return Ok(Arc::clone(t));
            }
        }
        let c = f.charpoly(p).ok_or_else(|| PointError::MissingCharpoly {
            label: f.label.clone(),
            p,
        })?;
        let t = Arc::new(PowerSumTable::new(c, p, max_k)?);
        self.tables
            .write()
            .expect("cache lock")
            .insert(key, Arc::clone(&t));
        Ok(t)
    }
}

/// Coprime pairs with `n0·n_ns² ≤ max_n`, in increasing `(n0, n_ns)`
/// order, optionally restricted to `only`.
pub fn level_pairs(max_n: u64, only: Option<&[[u64; 2]]>) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut n_ns = 1u64;
    while n_ns * n_ns <= max_n {
        for n0 in 1..=max_n / (n_ns * n_ns) {
            if gcd(n0, n_ns) == 1 {
                out.push((n0, n_ns));
            }
        }
        n_ns += 1;
    }
    if let Some(only) = only {
        out.retain(|(a, b)| only.contains(&[*a, *b]));
    }
    out.sort_unstable();
    out
}

fn skip(level: &BorelCartanLevel, p: Option<u64>, reason: String) -> SkipRecord {
    SkipRecord {
        n0: level.n0(),
        n_ns: level.n_ns(),
        p,
        reason,
    }
}

/// All rows of one level pair: every subgroup, every prime of `primes`
/// not dividing `n`, and `k = 1..=max_k(p)`.
pub fn scan_pair(
    level: &BorelCartanLevel,
    store: &NewformStore,
    primes: &[(u64, u32)],
    policy: EpsilonPolicy,
    cache: &PowerSumCache,
) -> PairOutcome {
    let mut out = PairOutcome::default();
    let missing: Vec<String> = level
        .relevant_levels()
        .into_iter()
        .filter(|l| !store.is_covered(*l))
        .map(|l| l.to_string())
        .collect();
    if !missing.is_empty() {
        out.skips.push(skip(
            level,
            None,
            format!("relevant levels not covered: {}", missing.join(",")),
        ));
        return out;
    }
    if level.r() > MAX_ENUMERATION_RANK {
        out.skips.push(skip(
            level,
            None,
            format!("r = {} exceeds {MAX_ENUMERATION_RANK}", level.r()),
        ));
        return out;
    }

    let mut forms: Vec<Arc<NewformRecord>> = Vec::new();
    for l in level.relevant_levels() {
        forms.extend(store.newforms_of_level(l).expect("covered").iter().cloned());
    }
    let subgroups = enumerate_subgroups(level.r()).expect("rank checked");
    let mults: Result<Vec<Vec<u64>>, MultiplicityError> = forms
        .iter()
        .map(|f| {
            let w = CharacterWeights::new(f, level, policy)?;
            subgroups.iter().map(|k| w.multiplicity(k)).collect()
        })
        .collect();
    let mults = match mults {
        Ok(m) => m,
        Err(e) => {
            out.skips.push(skip(level, None, e.to_string()));
            return out;
        }
    };
    let used: Vec<usize> = (0..forms.len())
        .filter(|i| mults[*i].iter().any(|m| *m > 0))
        .collect();
    let curves: Vec<(QuotientCurve, u64)> = subgroups
        .iter()
        .enumerate()
        .map(|(j, k)| {
            let g = used.iter().map(|i| mults[*i][j] * forms[*i].dim as u64).sum();
            (QuotientCurve::new(level.clone(), k.clone()).expect("same rank"), g)
        })
        .collect();

    for &(p, max_k) in primes {
        if level.n().is_multiple_of(p) {
            continue;
        }
        let tables: Result<Vec<Arc<PowerSumTable>>, PointError> =
            used.iter().map(|i| cache.get(&forms[*i], p, max_k)).collect();
        let tables = match tables {
            Ok(t) => t,
            Err(e) => {
                out.skips.push(skip(level, Some(p), e.to_string()));
                continue;
            }
        };
        for (j, (curve, genus)) in curves.iter().enumerate() {
            for k in 1..=max_k {
                let mut trace = BigInt::zero();
                for (t, i) in tables.iter().zip(&used) {
                    let m = mults[*i][j];
                    if m > 0 {
                        trace += t.get(k) * m;
                    }
                }
                let q = FieldSize { p, k };
                match count_from_trace(curve, *genus, q, trace) {
                    Ok(res) => out.rows.push(ScanRow {
                        curve: curve.clone(),
                        genus: *genus,
                        q,
                        count: res.count,
                        maximal: res.maximal,
                    }),
                    Err(e) => {
                        log::warn!("{e}");
                        out.skips.push(skip(level, Some(p), e.to_string()));
                    }
                }
            }
        }
    }
    sort_rows(&mut out.rows);
    out.skips.sort();
    out.skips.dedup();
    out
}

/// Sidecar path next to the CSV output: `scan.csv` gives `scan.<suffix>`.
pub fn sidecar_path(output: &Path, suffix: &str) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scan".to_string());
    output.with_file_name(format!("{stem}.{suffix}"))
}

/// Runs the scan, resuming from the journal next to `cfg.output`, and
/// writes the sorted CSV and the skip sidecar.
pub fn scan(cfg: &ScanConfig, store: &NewformStore) -> Result<ScanOutcome, ScanError> {
    cfg.validate()?;
    if let Some(dir) = cfg.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| ScanError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let checksum = cfg.checksum(store);
    let (journal, mut done) = journal::Journal::open(&sidecar_path(&cfg.output, "journal.jsonl"), &checksum)?;
    let pairs = level_pairs(cfg.max_n, cfg.pairs.as_deref());
    done.retain(|pair, _| pairs.binary_search(pair).is_ok());
    let resumed = done.len();
    let todo: Vec<(u64, u64)> = pairs.iter().filter(|p| !done.contains_key(p)).copied().collect();
    log::info!(
        "{} level pairs, {resumed} from the journal, {} to compute",
        pairs.len(),
        todo.len()
    );

    let primes: Vec<(u64, u32)> = cfg
        .sorted_primes()
        .into_iter()
        .map(|p| (p, cfg.max_k_for(p)))
        .collect();
    let policy = cfg.policy();
    let cache = PowerSumCache::default();
    let journal = Mutex::new(journal);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| ScanError::ThreadPool(e.to_string()))?;
    let computed: Vec<((u64, u64), PairOutcome)> = pool.install(|| {
        todo.par_iter()
            .map(|&(n0, n_ns)| {
                let level = BorelCartanLevel::new(n0, n_ns).expect("coprime pair");
                let outcome = scan_pair(&level, store, &primes, policy, &cache);
                journal
                    .lock()
                    .expect("journal lock")
                    .append((n0, n_ns), &outcome)?;
                Ok(((n0, n_ns), outcome))
            })
            .collect::<Result<Vec<_>, ScanError>>()
    })?;
    let n_computed = computed.len();
    done.extend(computed);

    let mut rows = Vec::new();
    let mut skips = Vec::new();
    for (_, o) in done {
        rows.extend(o.rows);
        skips.extend(o.skips);
    }
    sort_rows(&mut rows);
    skips.sort();
    write_rows_csv(&cfg.output, &rows)?;
    write_skips(&sidecar_path(&cfg.output, "skips.json"), &skips)?;
    Ok(ScanOutcome {
        rows,
        skips,
        computed: n_computed,
        resumed,
    })
}

pub const CSV_HEADER: [&str; 6] = ["curve", "genus", "p", "k", "count", "maximal"];

pub fn write_rows_csv(path: &Path, rows: &[ScanRow]) -> Result<(), ScanError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.curve.to_string(),
            r.genus.to_string(),
            r.q.p.to_string(),
            r.q.k.to_string(),
            r.count.to_string(),
            r.maximal.to_string(),
        ])?;
    }
    w.flush().map_err(|source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a CSV written by [`write_rows_csv`].
pub fn read_rows_csv(path: &Path) -> Result<Vec<ScanRow>, ScanError> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let bad = |reason: String| ScanError::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            reason,
        };
        if rec.len() != CSV_HEADER.len() {
            return Err(bad(format!("expected {} fields", CSV_HEADER.len())));
        }
        let curve: QuotientCurve = rec[0].parse().map_err(|e: crate::curve::CurveError| bad(e.to_string()))?;
        let num = |s: &str| s.parse::<u64>().map_err(|e| bad(format!("{s:?}: {e}")));
        let q = FieldSize::new(num(&rec[2])?, num(&rec[3])? as u32)?;
        out.push(ScanRow {
            curve,
            genus: num(&rec[1])?,
            q,
            count: rec[4].parse().map_err(|_| bad(format!("bad count {:?}", &rec[4])))?,
            maximal: rec[5].parse().map_err(|_| bad(format!("bad flag {:?}", &rec[5])))?,
        });
    }
    Ok(out)
}

fn write_skips(path: &Path, skips: &[SkipRecord]) -> Result<(), ScanError> {
    let mut text = serde_json::to_string_pretty(skips).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Rows grouped by level pair, in order.
pub fn rows_by_pair(rows: &[ScanRow]) -> BTreeMap<(u64, u64), Vec<&ScanRow>> {
    let mut out: BTreeMap<(u64, u64), Vec<&ScanRow>> = BTreeMap::new();
    for r in rows {
        let l = r.curve.level();
        out.entry((l.n0(), l.n_ns())).or_default().push(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_up_to_12() {
        let ps = level_pairs(12, None);
        assert_eq!(ps.len(), 12 + 2 + 1);
        assert!(ps.contains(&(3, 2)));
        assert!(!ps.contains(&(2, 2)));
        assert!(ps.contains(&(1, 3)));
        assert_eq!(level_pairs(12, Some(&[[3, 2], [5, 5]])), vec![(3, 2)]);
    }

    #[test]
    fn sidecars() {
        let p = Path::new("out/scan.csv");
        assert_eq!(sidecar_path(p, "skips.json"), Path::new("out/scan.skips.json"));
    }
}
