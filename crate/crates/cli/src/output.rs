use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::CliError;

/// Writes `path` through a temporary file in the same directory and renames
/// it into place, so readers never see a half-written file.
pub fn write_atomically<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(CliError::output(dir))?;
    let tmp = NamedTempFile::new_in(dir).map_err(CliError::output(path))?;
    {
        let mut sink = BufWriter::new(tmp.as_file());
        fill(&mut sink)?;
        sink.flush().map_err(CliError::output(path))?;
    }
    tmp.persist(path).map_err(|e| CliError::Output {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}
