//! Weight-2 newform data: records, the fixture format and the store.

mod fixture;
mod record;
mod store;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use fixture::{load_fixtures, FixtureFile, SCHEMA_VERSION};
pub use record::{NewformRecord, Sign};
pub use store::{NewformStore, FIXTURES_ENV};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("fixture schema violation: {0}")]
    Schema(#[source] serde_json::Error),
    #[error("unsupported fixture schema_version {0}")]
    UnsupportedSchema(u32),
    #[error("record {label}: {reason}")]
    InvalidRecord { label: String, reason: String },
    #[error("record {label}: missing Atkin-Lehner sign for {q}")]
    MissingAlSign { label: String, q: u64 },
    #[error("record {label}: charpoly at {p} has a root outside [-2√p, 2√p]")]
    WeilBound { label: String, p: u64 },
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("level {level} is covered by two sources that disagree")]
    ConflictingLevel { level: u64 },
    #[error("level {0} is not covered by the loaded fixtures")]
    NotCovered(u64),
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<StoreError>,
    },
    #[error("no fixtures given and {FIXTURES_ENV} is not set")]
    NoFixtures,
}

impl StoreError {
    fn in_file(self, path: &Path) -> StoreError {
        match self {
            e @ (StoreError::Io { .. } | StoreError::InFile { .. }) => e,
            e => StoreError::InFile {
                path: path.to_path_buf(),
                source: Box::new(e),
            },
        }
    }
}
