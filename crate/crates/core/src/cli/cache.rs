use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Content-addressed store of command outputs.
///
/// Each entry is one file named by the SHA-256 of the request description; the
/// first line holds the exit code and the rest is the exact output. Writes go to a
/// temporary file in the same directory and are renamed into place.
pub struct ResultCache {
    root: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachedOutput {
    pub code: i32,
    pub body: String,
}

impl ResultCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ResultCache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn key(parts: &[(&str, String)]) -> String {
        let mut h = Sha256::new();
        for (name, value) in parts {
            h.update(name.as_bytes());
            h.update([0]);
            h.update(value.as_bytes());
            h.update([0xff]);
        }
        format!("{:x}", h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.root.join(format!("{key}.out"))
    }

    pub fn get(&self, key: &str) -> Option<CachedOutput> {
        let raw = fs::read_to_string(self.path(key)).ok()?;
        let (code, body) = raw.split_once('\n')?;
        Some(CachedOutput { code: code.parse().ok()?, body: body.to_string() })
    }

    pub fn put(&self, key: &str, out: &CachedOutput) -> std::io::Result<()> {
        fs::create_dir_all(&self.root)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)?;
        write!(tmp, "{}\n{}", out.code, out.body)?;
        tmp.flush()?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResultCache::new(dir.path().join("nested"));
        let key = ResultCache::key(&[("g", "2".into()), ("n", "3".into())]);
        assert!(cache.get(&key).is_none());
        let out = CachedOutput { code: 1, body: "a\nb\n".into() };
        cache.put(&key, &out).unwrap();
        assert_eq!(cache.get(&key), Some(out));
        assert_ne!(key, ResultCache::key(&[("g", "2".into()), ("n", "4".into())]));
        // field boundaries are part of the key
        assert_ne!(
            ResultCache::key(&[("a", "bc".into())]),
            ResultCache::key(&[("ab", "c".into())])
        );
    }
}
