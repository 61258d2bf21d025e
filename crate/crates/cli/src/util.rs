//! Small shared helpers: atomic file output and frame-list expansion.

use std::io::Write;
use std::path::{Path, PathBuf};

/// Write via a temp file in the target directory, then rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Expand one input into an ordered frame list. Directories contribute their
/// .ppm/.png entries in sorted order.
pub fn expand_one(input: &Path) -> Result<Vec<PathBuf>, String> {
    if input.is_dir() {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(input)
            .map_err(|e| format!("cannot read directory {}: {e}", input.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("ppm") | Some("png")
                )
            })
            .collect();
        entries.sort();
        Ok(entries)
    } else if input.is_file() {
        Ok(vec![input.to_path_buf()])
    } else {
        Err(format!("no such file or directory: {}", input.display()))
    }
}

/// Expand a mixed list of files and directories, failing on the first
/// missing input.
pub fn expand_frames(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, String> {
    let mut frames = Vec::new();
    for input in inputs {
        frames.extend(expand_one(input)?);
    }
    Ok(frames)
}
