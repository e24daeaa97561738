//! Line-delimited JSON progress journal. The first line records the config
//! checksum; every further line holds the complete result of one level
//! pair together with a SHA-256 of that result.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{PairOutcome, ScanError, ScanRow, SkipRecord};

/// `(curve, genus, p, k, count, maximal)`
type RowTuple = (String, u64, u64, u32, String, bool);

#[derive(Serialize, Deserialize)]
struct Header {
    config_sha256: String,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    n0: u64,
    n_ns: u64,
    rows: Vec<RowTuple>,
    skips: Vec<SkipRecord>,
    sha256: String,
}

fn digest(n0: u64, n_ns: u64, rows: &[RowTuple], skips: &[SkipRecord]) -> String {
    let body = serde_json::to_string(&(n0, n_ns, rows, skips)).expect("serializable");
    hex::encode(Sha256::digest(body.as_bytes()))
}

fn to_tuple(r: &ScanRow) -> RowTuple {
    (
        r.curve.to_string(),
        r.genus,
        r.q.p,
        r.q.k,
        r.count.to_string(),
        r.maximal,
    )
}

fn from_tuple(t: RowTuple) -> Option<ScanRow> {
    Some(ScanRow {
        curve: t.0.parse().ok()?,
        genus: t.1,
        q: crate::points::FieldSize::new(t.2, t.3).ok()?,
        count: t.4.parse().ok()?,
        maximal: t.5,
    })
}

fn entry_line(pair: (u64, u64), outcome: &PairOutcome) -> String {
    let rows: Vec<RowTuple> = outcome.rows.iter().map(to_tuple).collect();
    let sha256 = digest(pair.0, pair.1, &rows, &outcome.skips);
    let e = Entry {
        n0: pair.0,
        n_ns: pair.1,
        rows,
        skips: outcome.skips.clone(),
        sha256,
    };
    serde_json::to_string(&e).expect("serializable")
}

fn parse_entry(line: &str) -> Option<((u64, u64), PairOutcome)> {
    let e: Entry = serde_json::from_str(line).ok()?;
    if digest(e.n0, e.n_ns, &e.rows, &e.skips) != e.sha256 {
        return None;
    }
    let rows = e.rows.into_iter().map(from_tuple).collect::<Option<Vec<_>>>()?;
    Some((
        (e.n0, e.n_ns),
        PairOutcome {
            rows,
            skips: e.skips,
        },
    ))
}

pub(super) struct Journal {
    path: PathBuf,
    file: File,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScanError + '_ {
    move |source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Completed pairs recovered from a journal.
pub(super) type Completed = BTreeMap<(u64, u64), PairOutcome>;

impl Journal {
    /// Opens the journal, keeping the entries that verify against their
    /// checksum and were written under the same config. The file is
    /// rewritten so that a torn last line cannot corrupt later appends.
    pub(super) fn open(
        path: &Path,
        config_sha256: &str,
    ) -> Result<(Journal, Completed), ScanError> {
        let mut done = BTreeMap::new();
        if path.exists() {
            let f = File::open(path).map_err(io_err(path))?;
            let mut lines = BufReader::new(f).lines();
            let same_config = match lines.next() {
                Some(Ok(first)) => serde_json::from_str::<Header>(&first)
                    .map(|h| h.config_sha256 == config_sha256)
                    .unwrap_or(false),
                _ => false,
            };
            if same_config {
                for line in lines {
                    let Ok(line) = line else { break };
                    match parse_entry(&line) {
                        Some((pair, outcome)) => {
                            done.insert(pair, outcome);
                        }
                        None => log::warn!("{}: dropping unreadable journal line", path.display()),
                    }
                }
            } else {
                log::info!("{}: config changed, starting a fresh journal", path.display());
            }
        }
        let mut file = File::create(path).map_err(io_err(path))?;
        let header = serde_json::to_string(&Header {
            config_sha256: config_sha256.to_string(),
        })
        .expect("serializable");
        let mut text = header + "\n";
        for (pair, outcome) in &done {
            text.push_str(&entry_line(*pair, outcome));
            text.push('\n');
        }
        file.write_all(text.as_bytes()).map_err(io_err(path))?;
        file.flush().map_err(io_err(path))?;
        Ok((
            Journal {
                path: path.to_path_buf(),
                file,
            },
            done,
        ))
    }

    pub(super) fn append(&mut self, pair: (u64, u64), outcome: &PairOutcome) -> Result<(), ScanError> {
        let line = entry_line(pair, outcome) + "\n";
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(io_err(&self.path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome() -> PairOutcome {
        PairOutcome {
            rows: vec![ScanRow {
                curve: "(6,7){1,2;3}".parse().unwrap(),
                genus: 7,
                q: crate::points::FieldSize::new(11, 5).unwrap(),
                count: 166666.into(),
                maximal: true,
            }],
            skips: vec![],
        }
    }

    #[test]
    fn round_trip_and_tamper() {
        let line = entry_line((6, 7), &outcome());
        let (pair, back) = parse_entry(&line).unwrap();
        assert_eq!(pair, (6, 7));
        assert_eq!(back, outcome());
        let tampered = line.replace("166666", "166667");
        assert!(parse_entry(&tampered).is_none());
        assert!(parse_entry(&line[..line.len() / 2]).is_none());
    }

    #[test]
    fn reopen_keeps_entries_only_for_same_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.jsonl");
        let (mut j, done) = Journal::open(&path, "abc").unwrap();
        assert!(done.is_empty());
        j.append((6, 7), &outcome()).unwrap();
        drop(j);
        let mut f = std::fs::OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"n0\":1,\"n_ns\"").unwrap();
        drop(f);
        let (_, done) = Journal::open(&path, "abc").unwrap();
        assert_eq!(done.len(), 1);
        let (_, done) = Journal::open(&path, "abc").unwrap();
        assert_eq!(done.len(), 1);
        let (_, done) = Journal::open(&path, "other").unwrap();
        assert!(done.is_empty());
    }
}
