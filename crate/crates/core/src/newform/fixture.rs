use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Deserialize;

use super::{NewformRecord, Sign, StoreError};
use crate::arith::{IntPoly, Poly};

pub const SCHEMA_VERSION: u32 = 1;

/// The on-disk fixture document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixtureFile {
    pub schema_version: u32,
    /// Levels for which `records` is the complete newspace.
    pub coverage: BTreeSet<u64>,
    /// Sorted by level, then label.
    pub records: Vec<NewformRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema_version: u32,
    coverage: Vec<u64>,
    records: Vec<RawRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    label: String,
    level: u64,
    dim: usize,
    al_signs: Vec<(u64, i64)>,
    #[serde(default)]
    al_extended: Vec<(u64, i64)>,
    hecke_charpolys: BTreeMap<String, Vec<serde_json::Number>>,
}

fn record_order(a: &NewformRecord, b: &NewformRecord) -> std::cmp::Ordering {
    (a.level, a.label.len(), &a.label).cmp(&(b.level, b.label.len(), &b.label))
}

fn sign_map(label: &str, field: &str, pairs: Vec<(u64, i64)>) -> Result<BTreeMap<u64, Sign>, StoreError> {
    let mut out = BTreeMap::new();
    for (q, s) in pairs {
        let sign = Sign::from_i64(s).ok_or_else(|| StoreError::InvalidRecord {
            label: label.to_string(),
            reason: format!("{field}[{q}] = {s} is not a sign"),
        })?;
        if out.insert(q, sign).is_some() {
            return Err(StoreError::InvalidRecord {
                label: label.to_string(),
                reason: format!("{field} lists {q} twice"),
            });
        }
    }
    Ok(out)
}

impl RawRecord {
    fn into_record(self) -> Result<NewformRecord, StoreError> {
        let label = self.label;
        let al_signs = sign_map(&label, "al_signs", self.al_signs)?;
        let al_extended = sign_map(&label, "al_extended", self.al_extended)?;
        let mut hecke_charpolys = BTreeMap::new();
        for (key, coeffs) in self.hecke_charpolys {
            let bad = |reason: String| StoreError::InvalidRecord {
                label: label.clone(),
                reason,
            };
            let p: u64 = key
                .parse()
                .map_err(|_| bad(format!("charpoly key {key:?} is not an integer")))?;
            let coeffs = coeffs
                .iter()
                .map(|n| {
                    n.to_string()
                        .parse::<BigInt>()
                        .map_err(|_| bad(format!("charpoly at {p} has non-integer coefficient {n}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if coeffs.last().is_some_and(|c| c == &BigInt::from(0)) {
                return Err(bad(format!("charpoly at {p} has a zero leading coefficient")));
            }
            hecke_charpolys.insert(p, Poly::new(coeffs));
        }
        Ok(NewformRecord {
            label,
            level: self.level,
            dim: self.dim,
            al_signs,
            al_extended,
            hecke_charpolys,
        })
    }
}

impl FixtureFile {
    pub fn new(coverage: BTreeSet<u64>, mut records: Vec<NewformRecord>) -> Self {
        records.sort_by(record_order);
        FixtureFile {
            schema_version: SCHEMA_VERSION,
            coverage,
            records,
        }
    }

    /// Parses and validates a fixture document.
    pub fn parse(text: &str) -> Result<Self, StoreError> {
        let raw: RawFile = serde_json::from_str(text).map_err(StoreError::Schema)?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(StoreError::UnsupportedSchema(raw.schema_version));
        }
        let records = raw
            .records
            .into_iter()
            .map(RawRecord::into_record)
            .collect::<Result<Vec<_>, _>>()?;
        let file = FixtureFile::new(raw.coverage.into_iter().collect(), records);
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, StoreError> {
        let text = std::fs::read_to_string(path).map_err(|source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        FixtureFile::parse(&text).map_err(|e| e.in_file(path))
    }

    /// Checks file-level invariants and validates every record in parallel.
    pub fn validate(&self) -> Result<(), StoreError> {
        let mut seen = HashSet::new();
        for r in &self.records {
            if !seen.insert(r.label.as_str()) {
                return Err(StoreError::DuplicateLabel(r.label.clone()));
            }
            if !self.coverage.contains(&r.level) {
                return Err(StoreError::InvalidRecord {
                    label: r.label.clone(),
                    reason: format!("level {} is not listed in coverage", r.level),
                });
            }
        }
        self.records.par_iter().try_for_each(NewformRecord::validate)
    }

    /// Canonical serialization: one record per line, sorted keys, no
    /// insignificant whitespace.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        let coverage: Vec<String> = self.coverage.iter().map(u64::to_string).collect();
        writeln!(
            out,
            "{{\"schema_version\":{},\"coverage\":[{}],\"records\":[",
            self.schema_version,
            coverage.join(",")
        )
        .unwrap();
        let mut sorted: Vec<&NewformRecord> = self.records.iter().collect();
        sorted.sort_by(|a, b| record_order(a, b));
        let lines: Vec<String> = sorted.into_iter().map(record_line).collect();
        out.push_str(&lines.join(",\n"));
        if !lines.is_empty() {
            out.push('\n');
        }
        out.push_str("]}\n");
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), StoreError> {
        std::fs::write(path, self.to_canonical_string()).map_err(|source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn signs_json(m: &BTreeMap<u64, Sign>) -> String {
    m.iter()
        .map(|(q, s)| format!("[{},{}]", q, s.as_i64()))
        .collect::<Vec<_>>()
        .join(",")
}

fn poly_json(c: &IntPoly) -> String {
    c.coeffs()
        .iter()
        .map(BigInt::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn record_line(r: &NewformRecord) -> String {
    let cps: Vec<String> = r
        .hecke_charpolys
        .iter()
        .map(|(p, c)| format!("\"{}\":[{}]", p, poly_json(c)))
        .collect();
    format!(
        "{{\"label\":{},\"level\":{},\"dim\":{},\"al_signs\":[{}],\"al_extended\":[{}],\"hecke_charpolys\":{{{}}}}}",
        serde_json::to_string(&r.label).unwrap(),
        r.level,
        r.dim,
        signs_json(&r.al_signs),
        signs_json(&r.al_extended),
        cps.join(",")
    )
}

/// Reads and validates one fixture file.
pub fn load_fixtures(path: &Path) -> Result<FixtureFile, StoreError> {
    FixtureFile::read(path)
}
