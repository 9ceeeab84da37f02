//! Atomic output writing: files land via rename, and a failed command
//! removes whatever it already wrote.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub struct OutputDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    /// Write one file atomically (temp file + rename in the same directory).
    pub fn write(&mut self, name: &str, content: &str) -> Result<()> {
        let target = self.dir.join(name);
        let tmp = tempfile::NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("cannot create temp file in {}", self.dir.display()))?;
        std::fs::write(tmp.path(), content)
            .with_context(|| format!("cannot write {}", target.display()))?;
        tmp.persist(&target)
            .with_context(|| format!("cannot move output into place at {}", target.display()))?;
        self.written.push(target);
        Ok(())
    }

    /// Remove everything written so far.
    pub fn rollback(&mut self) {
        for path in self.written.drain(..) {
            let _ = std::fs::remove_file(path);
        }
    }
}

/// Run `body` against a fresh output directory; on error the partial
/// outputs are removed before the error propagates.
pub fn with_output_dir<T>(
    dir: &Path,
    body: impl FnOnce(&mut OutputDir) -> Result<T>,
) -> Result<T> {
    let mut out = OutputDir::create(dir)?;
    match body(&mut out) {
        Ok(value) => Ok(value),
        Err(err) => {
            out.rollback();
            Err(err)
        }
    }
}

/// RFC 3339 generation stamp, or None under `--reproducible`.
pub fn generated_at(reproducible: bool) -> Option<String> {
    (!reproducible).then(|| {
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    })
}
