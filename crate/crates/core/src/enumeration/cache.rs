//! Append-only coefficient cache.
//!
//! Entries live at `<dir>/<fingerprint>/<key-file>` and are written through a
//! temporary file that is linked into place only if the name is still free,
//! so concurrent writers never clobber each other and readers never see a
//! partial file. Deleting the directory is always safe.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "THETALAB_CACHE";
const HEADER: &str = "thetalab-cache v1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub writes: u64,
}

/// In-memory cache, optionally backed by a directory.
#[derive(Debug, Default)]
pub struct CoefficientCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<(String, String), String>>,
    hits: AtomicU64,
    misses: AtomicU64,
    writes: AtomicU64,
}

impl CoefficientCache {
    pub fn in_memory() -> Self {
        CoefficientCache::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        CoefficientCache { dir: Some(dir.into()), ..CoefficientCache::default() }
    }

    /// Directory from `THETALAB_CACHE`, or memory only if unset.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => CoefficientCache::with_dir(PathBuf::from(d)),
            _ => CoefficientCache::in_memory(),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            writes: self.writes.load(Ordering::Relaxed),
        }
    }

    fn file_path(dir: &Path, fingerprint: &str, key: &str) -> PathBuf {
        let readable: String = key
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .take(64)
            .collect();
        let digest = hex::encode(&Sha256::digest(key.as_bytes())[..8]);
        dir.join(fingerprint).join(format!("{readable}.{digest}"))
    }

    pub fn get(&self, fingerprint: &str, key: &str) -> Option<String> {
        let mem_key = (fingerprint.to_string(), key.to_string());
        if let Some(v) = self.memory.lock().expect("cache lock poisoned").get(&mem_key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Some(v.clone());
        }
        if let Some(dir) = &self.dir {
            let path = CoefficientCache::file_path(dir, fingerprint, key);
            if let Ok(text) = std::fs::read_to_string(&path) {
                if let Some(body) = parse_entry(&text, key) {
                    self.memory.lock().expect("cache lock poisoned").insert(mem_key, body.clone());
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    return Some(body);
                }
                log::warn!("ignoring malformed cache entry {}", path.display());
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        None
    }

    /// Stores `value` unless an entry exists. Disk errors are logged and
    /// otherwise ignored; the cache is an accelerator, never a dependency.
    pub fn put(&self, fingerprint: &str, key: &str, value: &str) {
        self.memory
            .lock()
            .expect("cache lock poisoned")
            .entry((fingerprint.to_string(), key.to_string()))
            .or_insert_with(|| value.to_string());
        let Some(dir) = &self.dir else { return };
        let path = CoefficientCache::file_path(dir, fingerprint, key);
        if path.exists() {
            return;
        }
        match write_exclusive(&path, key, value) {
            Ok(true) => {
                self.writes.fetch_add(1, Ordering::Relaxed);
            }
            Ok(false) => {}
            Err(e) => log::warn!("cache write to {} failed: {e}", path.display()),
        }
    }
}

fn parse_entry(text: &str, key: &str) -> Option<String> {
    let rest = text.strip_prefix(HEADER)?.strip_prefix('\n')?;
    let (key_line, body) = rest.split_once('\n')?;
    (key_line.strip_prefix("key ")? == key).then(|| body.to_string())
}

fn write_exclusive(path: &Path, key: &str, value: &str) -> std::io::Result<bool> {
    let parent = path.parent().expect("cache path has a parent");
    std::fs::create_dir_all(parent)?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
    write!(tmp, "{HEADER}\nkey {key}\n{value}")?;
    tmp.as_file().sync_all()?;
    match tmp.persist_noclobber(path) {
        Ok(_) => Ok(true),
        Err(e) if e.error.kind() == std::io::ErrorKind::AlreadyExists => Ok(false),
        Err(e) => Err(e.error),
    }
}
