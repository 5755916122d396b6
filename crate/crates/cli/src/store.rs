//! Registry file access. Writers hold an exclusive advisory lock on a
//! sibling `.lock` file for the whole read-modify-write cycle; readers take
//! no lock since saves replace the file atomically.

use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clothbench_core::registry::Registry;

pub fn read(path: &Path) -> Result<Registry> {
    if !path.exists() {
        log::info!("{} does not exist yet, using an empty registry", path.display());
        return Ok(Registry::new());
    }
    Ok(Registry::load(path)?)
}

/// Load, apply `f`, and save only if `f` succeeds.
pub fn update<T>(path: &Path, f: impl FnOnce(&mut Registry) -> Result<T>) -> Result<T> {
    let lock = lock_path(path);
    let guard = OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&lock)
        .with_context(|| format!("opening {}", lock.display()))?;
    guard.lock().with_context(|| format!("locking {}", lock.display()))?;
    let mut reg = read(path)?;
    let out = f(&mut reg)?;
    reg.save(path)?;
    unlock(guard);
    Ok(out)
}

fn lock_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".lock");
    PathBuf::from(s)
}

fn unlock(f: File) {
    if let Err(e) = f.unlock() {
        log::warn!("releasing registry lock: {e}");
    }
}
