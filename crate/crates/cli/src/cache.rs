//! On-disk cache of computed Gram matrices and divisor lists.
//!
//! Each entry is a JSON file `{"key", "checksum", "payload"}` where the
//! checksum is the SHA-256 of the payload string. Entries are written to a
//! temporary file in the cache directory and renamed into place.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever the order of `Std(lambda)` or the basis conventions change.
pub const BASIS_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    checksum: String,
    payload: String,
}

fn checksum(payload: &str) -> String {
    Sha256::digest(payload.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// What a lookup found.
#[derive(Debug, PartialEq, Eq)]
pub enum Lookup<T> {
    Hit(T),
    Miss,
    /// The file exists but failed to parse or validate.
    Corrupt(String),
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    fn path(&self, key: &str) -> PathBuf {
        let name: String = key.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
        self.dir.join(format!("{name}-v{BASIS_VERSION}.json"))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Lookup<T> {
        let path = self.path(key);
        let Ok(text) = fs::read_to_string(&path) else {
            return Lookup::Miss;
        };
        let entry: Entry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        if entry.key != key {
            return Lookup::Corrupt(format!("{}: key {} does not match {key}", path.display(), entry.key));
        }
        if checksum(&entry.payload) != entry.checksum {
            return Lookup::Corrupt(format!("{}: checksum mismatch", path.display()));
        }
        match serde_json::from_str(&entry.payload) {
            Ok(v) => Lookup::Hit(v),
            Err(e) => Lookup::Corrupt(format!("{}: {e}", path.display())),
        }
    }

    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let payload = serde_json::to_string(value)?;
        let entry = Entry { key: key.to_string(), checksum: checksum(&payload), payload };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        tmp.as_file().sync_all()?;
        let path = self.path(key);
        tmp.persist(&path).with_context(|| format!("renaming into {}", path.display()))?;
        Ok(())
    }

    /// Cached value, or `compute` stored under `key`. Corrupt entries are
    /// reported on stderr and overwritten.
    pub fn get_or_compute<T, F>(&self, key: &str, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        match self.get(key) {
            Lookup::Hit(v) => return Ok(v),
            Lookup::Corrupt(why) => eprintln!("warning: corrupt cache entry, recomputing ({why})"),
            Lookup::Miss => {}
        }
        let v = compute()?;
        self.put(key, &v)?;
        Ok(v)
    }
}
