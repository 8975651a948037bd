use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::job::JobSpec;
use super::report::VERSION;
use crate::{Error, Result};

pub const DEFAULT_DIR: &str = ".udr-cache";

/// Reports on disk, keyed by a hash of the job and the tool version.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

/// SHA-256 of the job with everything that does not affect the result
/// (the output path) removed.
pub fn job_key(job: &JobSpec) -> String {
    let canonical = JobSpec { output: None, ..job.clone() };
    let text = serde_json::to_string(&canonical).expect("job specs serialize");
    let mut h = Sha256::new();
    h.update(VERSION.as_bytes());
    h.update(b"\n");
    h.update(text.as_bytes());
    hex::encode(h.finalize())
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.path(key)).ok()
    }

    pub fn store(&self, key: &str, body: &str) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::Io(e.to_string()))?;
        let tmp = self.dir.join(format!("{key}.tmp"));
        fs::write(&tmp, body).map_err(|e| Error::Io(e.to_string()))?;
        fs::rename(&tmp, self.path(key)).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn evict(&self, key: &str) {
        let _ = fs::remove_file(self.path(key));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::job::{parse_job, Command};

    #[test]
    fn key_ignores_output_path() {
        let a = parse_job("command = \"fingerprint\"\n[ring]\nkind = \"galois\"\np = 2\nm = 3\n").unwrap();
        let b = JobSpec { output: Some("elsewhere.json".into()), ..a.clone() };
        let c = JobSpec { command: Some(Command::HomCount), ..a.clone() };
        assert_eq!(job_key(&a), job_key(&b));
        assert_ne!(job_key(&a), job_key(&c));
        assert_eq!(job_key(&a).len(), 64);
    }

    #[test]
    fn store_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path().join("c"));
        assert!(cache.load("k").is_none());
        cache.store("k", "{}\n").unwrap();
        assert_eq!(cache.load("k").as_deref(), Some("{}\n"));
        cache.evict("k");
        assert!(cache.load("k").is_none());
    }
}
