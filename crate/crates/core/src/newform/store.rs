use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use super::{FixtureFile, NewformRecord, StoreError};

pub const FIXTURES_ENV: &str = "MCPOINT_FIXTURES";

/// Immutable index of newform records by level, with coverage metadata.
#[derive(Clone, Debug, Default)]
pub struct NewformStore {
    coverage: BTreeSet<u64>,
    by_level: BTreeMap<u64, Vec<Arc<NewformRecord>>>,
}

impl NewformStore {
    pub fn new() -> Self {
        NewformStore::default()
    }

    pub fn from_fixture(file: FixtureFile) -> Result<Self, StoreError> {
        let mut store = NewformStore::new();
        store.merge(file)?;
        Ok(store)
    }

    /// Adds a validated fixture. A level already covered must carry the
    /// same records in both sources.
    pub fn merge(&mut self, file: FixtureFile) -> Result<(), StoreError> {
        let mut incoming: BTreeMap<u64, Vec<Arc<NewformRecord>>> = BTreeMap::new();
        for r in file.records {
            incoming.entry(r.level).or_default().push(Arc::new(r));
        }
        for level in &file.coverage {
            let new = incoming.remove(level).unwrap_or_default();
            if self.coverage.contains(level) {
                let old = self.by_level.get(level).map(Vec::as_slice).unwrap_or(&[]);
                let same = old.len() == new.len()
                    && old.iter().zip(&new).all(|(a, b)| a.as_ref() == b.as_ref());
                if !same {
                    return Err(StoreError::ConflictingLevel { level: *level });
                }
                continue;
            }
            self.coverage.insert(*level);
            if !new.is_empty() {
                self.by_level.insert(*level, new);
            }
        }
        Ok(())
    }

    /// Loads a fixture file, or every `*.json` file under a directory in
    /// path order.
    pub fn load(path: &Path) -> Result<Self, StoreError> {
        let mut store = NewformStore::new();
        if path.is_dir() {
            let mut files = json_files(path)?;
            files.sort();
            for f in files {
                let file = FixtureFile::read(&f)?;
                store.merge(file).map_err(|e| e.in_file(&f))?;
            }
        } else {
            store.merge(FixtureFile::read(path)?)?;
        }
        log::debug!(
            "loaded {} records over {} levels from {}",
            store.len(),
            store.coverage.len(),
            path.display()
        );
        Ok(store)
    }

    /// Loads `path` if given, else the directory named by `MCPOINT_FIXTURES`.
    pub fn load_default(path: Option<&Path>) -> Result<Self, StoreError> {
        match path {
            Some(p) => NewformStore::load(p),
            None => match std::env::var_os(FIXTURES_ENV) {
                Some(dir) => NewformStore::load(Path::new(&dir)),
                None => Err(StoreError::NoFixtures),
            },
        }
    }

    pub fn coverage(&self) -> &BTreeSet<u64> {
        &self.coverage
    }

    pub fn is_covered(&self, level: u64) -> bool {
        self.coverage.contains(&level)
    }

    /// All classes of exactly this level, in label order. An empty slice
    /// means the newspace is known to be zero.
    pub fn newforms_of_level(&self, level: u64) -> Result<&[Arc<NewformRecord>], StoreError> {
        if !self.is_covered(level) {
            return Err(StoreError::NotCovered(level));
        }
        Ok(self.by_level.get(&level).map(Vec::as_slice).unwrap_or(&[]))
    }

    pub fn records(&self) -> impl Iterator<Item = &Arc<NewformRecord>> {
        self.by_level.values().flatten()
    }

    pub fn get(&self, label: &str) -> Option<&Arc<NewformRecord>> {
        self.records().find(|r| r.label == label)
    }

    pub fn len(&self) -> usize {
        self.by_level.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_fixture(&self) -> FixtureFile {
        FixtureFile::new(
            self.coverage.clone(),
            self.records().map(|r| r.as_ref().clone()).collect(),
        )
    }
}

fn json_files(dir: &Path) -> Result<Vec<std::path::PathBuf>, StoreError> {
    let io = |source| StoreError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let p = entry.map_err(io)?.path();
        if p.is_dir() {
            out.extend(json_files(&p)?);
        } else if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    Ok(out)
}
