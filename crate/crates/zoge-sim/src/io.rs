//! CSV and manifest plumbing shared by the experiment drivers.

use crate::error::{Error, Result};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Writes rows of f64 columns under a header line, atomically
/// (temp file + rename).
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                text.push(',');
            }
            first = false;
            // full round-trip precision
            text.push_str(&format!("{v:?}"));
        }
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all().ok();
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads a numeric CSV with a header line. Returns (column names, rows).
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid(format!("{}: empty file", path.display())))?;
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| {
            Error::invalid(format!(
                "{}:{}: bad number ({e})",
                path.display(),
                lineno + 2
            ))
        })?;
        if row.len() != names.len() {
            return Err(Error::invalid(format!(
                "{}:{}: {} fields, header has {}",
                path.display(),
                lineno + 2,
                row.len(),
                names.len()
            )));
        }
        rows.push(row);
    }
    Ok((names, rows))
}

/// Column index by name, with a helpful error.
pub fn column(names: &[String], want: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == want)
        .ok_or_else(|| Error::invalid(format!("missing column `{want}` (have: {names:?})")))
}

/// Creates the run directory, erroring only on real I/O problems.
pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::invalid(format!("manifest serialization: {e}")))?;
    write_atomic(path, text.as_bytes())
}

/// Short content hash used as the run id.
pub fn content_hash(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// Output root: $ZOGE_SIM_OUT or ./runs.
pub fn default_out_root() -> PathBuf {
    std::env::var_os("ZOGE_SIM_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}
