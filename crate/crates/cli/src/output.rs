//! Atomic file output: write to a temporary sibling, then rename.

use std::fs;
use std::io::Write;
use std::path::Path;

use retention_core::report::ReportFile;
use retention_core::Result;
use tempfile::NamedTempFile;

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Writes each file under `out_dir`, creating subdirectories as needed.
pub fn write_bundle(out_dir: &Path, files: &[ReportFile]) -> Result<()> {
    for f in files {
        write_atomic(&out_dir.join(&f.path), f.contents.as_bytes())?;
    }
    Ok(())
}
