//! Client for the LMFDB HTTP API that materializes weight-2,
//! trivial-character newform data as fixture files.
//!
//! Two collections are used: `mf_newforms` for labels, dimensions,
//! Atkin–Lehner signs and traces of `a_n`, and `mf_hecke_nf` for the
//! Hecke-field representation of `a_p` when the dimension exceeds one.
//! Raw rows are cached per level, so an offline run over a warm cache
//! reproduces the online result exactly.

mod cache;
mod convert;
mod http;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use mcpoint_core::arith::int::is_prime;
use mcpoint_core::newform::{load_fixtures, FixtureFile, StoreError};
use serde_json::Value;
use thiserror::Error;

pub use cache::{Cache, LevelData, LOCK_FILE};
pub use convert::record_from_rows;
pub use http::HttpClient;

pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org";
pub const URL_ENV: &str = "MCPOINT_LMFDB_URL";
/// Largest level the database covers completely.
pub const MAX_LEVEL: u64 = 10000;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("GET {url} failed with HTTP {status}")]
    Http { url: String, status: u16 },
    #[error("GET {url} failed: {message}")]
    Transport { url: String, message: String },
    #[error("level {level} is above {max}, outside the database's complete range")]
    LevelTooLarge { level: u64, max: u64 },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("{label}: response lacks Atkin-Lehner signs")]
    MissingAlData { label: String },
    #[error("{label}: dimension {expected} disagrees with {got}")]
    InconsistentDimension { label: String, expected: usize, got: String },
    #[error("{label}: no eigenvalue data at p = {p}")]
    MissingEigenvalues { label: String, p: u64 },
    #[error("{label}: trace of C_{p} is {charpoly_trace}, the published trace of a_{p} is {published}")]
    TraceMismatch {
        label: String,
        p: u64,
        charpoly_trace: String,
        published: String,
    },
    #[error("{url}: {reason}")]
    Malformed { url: String, reason: String },
    #[error("level {level} is not in the cache and the client is offline")]
    NotInCache { level: u64 },
    #[error("cache is locked by another process ({})", .0.display())]
    LockHeld(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FetchRequest {
    pub levels: BTreeSet<u64>,
    pub primes_needed: BTreeSet<u64>,
    pub cache_dir: PathBuf,
    pub offline: bool,
    /// Download again even when the level is cached.
    pub refresh: bool,
}

#[derive(Clone, Debug)]
pub struct ClientOptions {
    pub base_url: String,
    pub timeout: Duration,
    pub retries: u32,
    pub backoff: Duration,
}

impl Default for ClientOptions {
    fn default() -> Self {
        ClientOptions {
            base_url: std::env::var(URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string()),
            timeout: Duration::from_secs(30),
            retries: 5,
            backoff: Duration::from_secs(1),
        }
    }
}

const NEWFORM_FIELDS: &str = "label,level,dim,atkin_lehner_eigenvals,traces";

fn download(client: &HttpClient, level: u64) -> Result<LevelData, FetchError> {
    let newforms = client.get_all(&format!(
        "/api/mf_newforms/?level=i{level}&weight=i2&char_order=i1&_format=json&_fields={NEWFORM_FIELDS}"
    ))?;
    let mut hecke_nf = Vec::new();
    for row in &newforms {
        if row.get("dim").and_then(Value::as_u64).unwrap_or(1) > 1 {
            let label = convert::row_label(row)?;
            let rows = client.get_all(&format!("/api/mf_hecke_nf/?label={label}&_format=json"))?;
            hecke_nf.extend(rows.into_iter().take(1));
        }
    }
    Ok(LevelData {
        level,
        newforms,
        hecke_nf,
    })
}

fn check_request(req: &FetchRequest) -> Result<(), FetchError> {
    if let Some(&level) = req.levels.iter().find(|l| **l > MAX_LEVEL) {
        return Err(FetchError::LevelTooLarge { level, max: MAX_LEVEL });
    }
    if req.levels.contains(&0) {
        return Err(FetchError::InvalidRequest("level 0".into()));
    }
    if let Some(p) = req.primes_needed.iter().find(|p| !is_prime(**p)) {
        return Err(FetchError::InvalidRequest(format!("{p} is not prime")));
    }
    Ok(())
}

/// Fetches every requested level and returns the validated fixture. Levels
/// with an empty newspace are covered with no records.
pub fn fetch_levels(req: &FetchRequest, opts: &ClientOptions) -> Result<FixtureFile, FetchError> {
    check_request(req)?;
    let cache = Cache::open(&req.cache_dir)?;
    let client = HttpClient::new(&opts.base_url, opts.timeout, opts.retries, opts.backoff);
    let primes: Vec<u64> = req.primes_needed.iter().copied().collect();
    let mut records = Vec::new();
    for &level in &req.levels {
        let cached = if req.refresh && !req.offline {
            None
        } else {
            cache.load(level)?
        };
        let data = match cached {
            Some(d) => d,
            None if req.offline => return Err(FetchError::NotInCache { level }),
            None => {
                let d = download(&client, level)?;
                cache.store(&d)?;
                d
            }
        };
        for row in &data.newforms {
            let label = convert::row_label(row)?;
            let nf = data
                .hecke_nf
                .iter()
                .find(|h| h.get("label").and_then(Value::as_str) == Some(label.as_str()));
            records.push(record_from_rows(row, nf, &primes)?);
        }
        log::info!("level {level}: {} newform classes", data.newforms.len());
    }
    let file = FixtureFile::new(req.levels.clone(), records);
    file.validate()?;
    Ok(file)
}

/// Fetches and merges into the fixture file at `output`: levels in the
/// request replace whatever the file held for them.
pub fn fetch_into(req: &FetchRequest, opts: &ClientOptions, output: &Path) -> Result<FixtureFile, FetchError> {
    let fresh = fetch_levels(req, opts)?;
    let merged = if output.exists() {
        let old = load_fixtures(output)?;
        let mut coverage = old.coverage.clone();
        coverage.extend(fresh.coverage.iter().copied());
        let mut records: Vec<_> = old
            .records
            .into_iter()
            .filter(|r| !fresh.coverage.contains(&r.level))
            .collect();
        records.extend(fresh.records);
        FixtureFile::new(coverage, records)
    } else {
        fresh
    };
    merged.validate()?;
    merged.write(output)?;
    Ok(merged)
}
