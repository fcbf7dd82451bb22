//! CSV and run-manifest emission.
//!
//! CSVs carry one header row, comma separators, '.' decimal points, LF line
//! endings, and UTF-8 text. Floats are printed with 17 significant digits
//! so re-parsing reproduces the exact bit pattern. Alongside its CSVs every
//! command writes a JSON manifest recording the invocation, the resolved
//! inputs, the seed, the produced files, and the wall time.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{CliError, CliResult};

/// Manifest layout revision.
pub const SCHEMA_VERSION: u32 = 1;

// ---- cell formatting ----

/// Formats a float with 17 significant digits.
pub fn float_cell(value: f64) -> String {
    if value.is_nan() {
        "NaN".to_string()
    } else {
        format!("{value:.16e}")
    }
}

/// Formats a count.
pub fn int_cell(value: usize) -> String {
    value.to_string()
}

/// Quotes a text cell when it contains separators or quotes.
pub fn text_cell(value: &str) -> String {
    if value.contains(',') || value.contains('"') || value.contains('\n') {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

// ---- CSV files ----

/// An in-memory CSV buffer flushed to disk once complete.
pub struct CsvFile {
    path: PathBuf,
    name: String,
    columns: usize,
    buffer: String,
}

impl CsvFile {
    pub fn new(dir: &Path, name: &str, header: &[&str]) -> CsvFile {
        let mut buffer = header.join(",");
        buffer.push('\n');
        CsvFile {
            path: dir.join(name),
            name: name.to_string(),
            columns: header.len(),
            buffer,
        }
    }

    pub fn push_row(&mut self, cells: &[String]) {
        assert_eq!(
            cells.len(),
            self.columns,
            "expected {} cells, got {}",
            self.columns,
            cells.len()
        );
        self.buffer.push_str(&cells.join(","));
        self.buffer.push('\n');
    }

    /// Writes the file and returns its name for the manifest.
    pub fn finish(self) -> CliResult<String> {
        std::fs::write(&self.path, self.buffer.as_bytes()).map_err(|err| {
            CliError::Runtime(format!("cannot write {}: {err}", self.path.display()))
        })?;
        Ok(self.name)
    }
}

// ---- manifest ----

/// Writes the JSON run manifest next to the CSVs.
pub fn write_manifest(
    dir: &Path,
    stem: &str,
    resolved: serde_json::Value,
    seed: Option<u64>,
    outputs: &[String],
    started: Instant,
) -> CliResult<()> {
    let manifest = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": std::env::args().collect::<Vec<String>>(),
        "resolved_config": resolved,
        "seed": seed,
        "outputs": outputs,
        "wall_time_ms": started.elapsed().as_secs_f64() * 1e3,
    });
    let path = dir.join(format!("{stem}_manifest.json"));
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|err| CliError::Runtime(err.to_string()))?;
    std::fs::write(&path, text + "\n")
        .map_err(|err| CliError::Runtime(format!("cannot write {}: {err}", path.display())))
}

/// Creates the output directory if needed.
pub fn prepare_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|err| CliError::Runtime(format!("cannot create {}: {err}", dir.display())))
}
