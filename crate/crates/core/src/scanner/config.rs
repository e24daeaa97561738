use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::int::is_prime;
use crate::multiplicity::EpsilonPolicy;
use crate::newform::NewformStore;

use super::ScanError;

fn default_max_k() -> u32 {
    5
}

fn default_max_k_by_prime() -> BTreeMap<String, u32> {
    BTreeMap::from([("2".to_string(), 7)])
}

fn default_genus_range() -> [u64; 2] {
    [0, 50]
}

fn default_threads() -> usize {
    1
}

/// Scanner settings, usually read from a TOML file.
///
/// ```toml
/// max_n = 400
/// primes = [2, 3, 5, 7, 11, 13]
/// max_k = 5
/// max_k_by_prime = { "2" = 7 }
/// genus_range = [2, 50]
/// fixtures = "fixtures/corpus"
/// output = "out/scan.csv"
/// threads = 4
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// Bound on `n0·n_ns²`.
    pub max_n: u64,
    pub primes: Vec<u64>,
    #[serde(default = "default_max_k")]
    pub max_k: u32,
    /// Per-prime overrides of `max_k`, keyed by the prime as a string.
    #[serde(default = "default_max_k_by_prime")]
    pub max_k_by_prime: BTreeMap<String, u32>,
    /// Inclusive genus range used for the tables; the raw CSV keeps every
    /// genus.
    #[serde(default = "default_genus_range")]
    pub genus_range: [u64; 2],
    pub fixtures: PathBuf,
    pub output: PathBuf,
    #[serde(default = "default_threads")]
    pub threads: usize,
    /// Restricts the scan to these `(n0, n_ns)` pairs.
    #[serde(default)]
    pub pairs: Option<Vec<[u64; 2]>>,
    /// CSV of `genus,q,bound` giving known upper bounds `M_g(q)`.
    #[serde(default)]
    pub bounds: Option<PathBuf>,
    /// Fail instead of assuming `+1` for signs missing from the data.
    #[serde(default)]
    pub strict_epsilon: bool,
}

impl ScanConfig {
    /// A config with the default extension degrees and genus range.
    pub fn new(max_n: u64, primes: Vec<u64>, fixtures: PathBuf, output: PathBuf) -> Self {
        ScanConfig {
            max_n,
            primes,
            max_k: default_max_k(),
            max_k_by_prime: default_max_k_by_prime(),
            genus_range: default_genus_range(),
            fixtures,
            output,
            threads: default_threads(),
            pairs: None,
            bounds: None,
            strict_epsilon: false,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ScanError> {
        let cfg: ScanConfig = toml::from_str(text).map_err(|e| ScanError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a TOML file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn read(path: &Path) -> Result<Self, ScanError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScanError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = ScanConfig::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.fixtures = base.join(&cfg.fixtures);
        cfg.output = base.join(&cfg.output);
        cfg.bounds = cfg.bounds.map(|b| base.join(b));
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        let bad = |m: String| Err(ScanError::Config(m));
        if self.max_n == 0 {
            return bad("max_n must be positive".into());
        }
        if let Some(p) = self.primes.iter().find(|p| !is_prime(**p)) {
            return bad(format!("{p} in primes is not prime"));
        }
        if self.max_k == 0 {
            return bad("max_k must be positive".into());
        }
        for (key, k) in &self.max_k_by_prime {
            match key.parse::<u64>() {
                Ok(p) if is_prime(p) && *k > 0 => {}
                _ => return bad(format!("bad max_k_by_prime entry {key:?} = {k}")),
            }
        }
        if self.genus_range[0] > self.genus_range[1] {
            return bad(format!("empty genus range {:?}", self.genus_range));
        }
        if self.threads == 0 {
            return bad("threads must be positive".into());
        }
        Ok(())
    }

    pub fn max_k_for(&self, p: u64) -> u32 {
        self.max_k_by_prime
            .get(&p.to_string())
            .copied()
            .unwrap_or(self.max_k)
    }

    pub fn policy(&self) -> EpsilonPolicy {
        if self.strict_epsilon {
            EpsilonPolicy::Strict
        } else {
            EpsilonPolicy::OldformPlusOne
        }
    }

    /// The primes to scan, sorted and deduplicated.
    pub fn sorted_primes(&self) -> Vec<u64> {
        let mut ps = self.primes.clone();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    pub fn in_genus_range(&self, g: u64) -> bool {
        (self.genus_range[0]..=self.genus_range[1]).contains(&g)
    }

    /// Hash of everything that determines the rows: the search space, the
    /// sign policy and the newform data. Thread count and paths are
    /// excluded.
    pub fn checksum(&self, store: &NewformStore) -> String {
        let primes: Vec<(u64, u32)> = self
            .sorted_primes()
            .into_iter()
            .map(|p| (p, self.max_k_for(p)))
            .collect();
        let mut pairs = self.pairs.clone();
        if let Some(v) = pairs.as_mut() {
            v.sort_unstable();
            v.dedup();
        }
        let key = serde_json::json!({
            "max_n": self.max_n,
            "primes": primes,
            "pairs": pairs,
            "strict_epsilon": self.strict_epsilon,
        });
        let mut h = Sha256::new();
        h.update(key.to_string().as_bytes());
        h.update(store.to_fixture().to_canonical_string().as_bytes());
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_with_defaults() {
        let cfg = ScanConfig::from_toml(
            "max_n = 294\nprimes = [11, 2]\nfixtures = \"f\"\noutput = \"o.csv\"\n",
        )
        .unwrap();
        assert_eq!(cfg.max_k_for(2), 7);
        assert_eq!(cfg.max_k_for(11), 5);
        assert_eq!(cfg.sorted_primes(), vec![2, 11]);
        assert_eq!(cfg.genus_range, [0, 50]);
        assert_eq!(cfg.threads, 1);
    }

    #[test]
    fn rejects_bad_values() {
        let base = "fixtures = \"f\"\noutput = \"o.csv\"\n";
        for extra in [
            "max_n = 0\nprimes = []\n",
            "max_n = 10\nprimes = [4]\n",
            "max_n = 10\nprimes = []\nthreads = 0\n",
            "max_n = 10\nprimes = []\nmax_k_by_prime = { \"6\" = 2 }\n",
            "max_n = 10\nprimes = []\ngenus_range = [5, 2]\n",
            "max_n = 10\nprimes = []\nunknown = 1\n",
        ] {
            assert!(ScanConfig::from_toml(&format!("{extra}{base}")).is_err(), "{extra}");
        }
    }
}
