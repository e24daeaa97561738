//! One JSON file of raw API rows per level, plus an advisory lock file.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::FetchError;

pub const LOCK_FILE: &str = ".mcpoint-lmfdb.lock";

/// Everything fetched for one level: the `mf_newforms` rows and the
/// `mf_hecke_nf` rows of forms of dimension above one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelData {
    pub level: u64,
    pub newforms: Vec<Value>,
    pub hecke_nf: Vec<Value>,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> FetchError + '_ {
    move |source| FetchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub struct Cache {
    dir: PathBuf,
    lock: PathBuf,
}

impl Cache {
    /// Creates the directory if needed and takes the lock. Fails fast when
    /// another process holds it.
    pub fn open(dir: &Path) -> Result<Cache, FetchError> {
        fs::create_dir_all(dir).map_err(io(dir))?;
        let lock = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                return Err(FetchError::LockHeld(lock));
            }
            Err(e) => return Err(io(&lock)(e)),
        }
        Ok(Cache {
            dir: dir.to_path_buf(),
            lock,
        })
    }

    pub fn path(&self, level: u64) -> PathBuf {
        self.dir.join(format!("level_{level:05}.json"))
    }

    pub fn load(&self, level: u64) -> Result<Option<LevelData>, FetchError> {
        let path = self.path(level);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        let data: LevelData = serde_json::from_str(&text).map_err(|e| FetchError::Malformed {
            url: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Ok(Some(data))
    }

    /// Writes through a temporary file so a crash never leaves a torn entry.
    pub fn store(&self, data: &LevelData) -> Result<(), FetchError> {
        let path = self.path(data.level);
        let tmp = path.with_extension("json.tmp");
        let mut f = File::create(&tmp).map_err(io(&tmp))?;
        let text = serde_json::to_string(data).expect("serializable");
        f.write_all(text.as_bytes()).map_err(io(&tmp))?;
        f.sync_all().map_err(io(&tmp))?;
        fs::rename(&tmp, &path).map_err(io(&path))
    }
}

impl Drop for Cache {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock);
    }
}
