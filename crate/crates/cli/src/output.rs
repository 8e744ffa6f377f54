//! CSV and JSON artifact writers.
//!
//! CSV: header row, comma separators, `.` decimal separator, `\n` line
//! endings, floats rendered with 17 significant digits so files round-trip
//! bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use dephase_core::{Error, Result};

/// A float with full 17-significant-digit precision.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(e: std::io::Error) -> Error {
    Error::Stats(format!("io: {e}"))
}

/// Writes a CSV table of pre-rendered cells.
pub fn write_csv(path: &Path, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    writeln!(w, "{}", columns.join(",")).map_err(io_err)?;
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        writeln!(w, "{}", row.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Writes pretty-printed JSON.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::Stats(format!("json: {e}")))?;
    writeln!(w).map_err(io_err)?;
    w.flush().map_err(io_err)
}
