//! Content-addressed result cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Bumped whenever an output format changes.
const CACHE_FORMAT: &str = "1";

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// `STRATOPS_CACHE_DIR`, else `$HOME/.cache/stratops`; disabled when
    /// neither is set or `enabled` is false.
    pub fn from_env(enabled: bool) -> Cache {
        let dir = enabled
            .then(|| {
                std::env::var_os("STRATOPS_CACHE_DIR")
                    .map(PathBuf::from)
                    .or_else(|| std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache").join("stratops")))
            })
            .flatten();
        Cache { dir }
    }

    pub fn key(parts: &[&str]) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION"));
        h.update([0]);
        h.update(CACHE_FORMAT);
        for p in parts {
            h.update([0]);
            h.update(p.as_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.dir.as_ref()?.join(key)).ok()
    }

    /// Best effort; a failed write only loses the cache entry.
    pub fn put(&self, key: &str, value: &str) {
        if let Some(dir) = &self.dir {
            let _ = fs::create_dir_all(dir).and_then(|_| write_atomic(&dir.join(key), value));
        }
    }
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
