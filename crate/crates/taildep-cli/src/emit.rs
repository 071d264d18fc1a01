//! Report emission.
//!
//! Every command writes `<base>.report.json` holding a schema-versioned
//! envelope: the resolved configuration, the master seed when the command
//! is stochastic, and the payload. Tables additionally go to
//! `<base>.<table>.csv`. Floats are printed by the same shortest
//! round-trip formatter in both files, so the numeric strings are
//! identical byte for byte.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: C,
    pub report: R,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("cannot write {}: {e}", path.display()))
}

/// Serialize the envelope to `<base>.report.json`.
pub fn write_report<C: Serialize, R: Serialize>(
    base: &Path,
    command: &str,
    seed: Option<u64>,
    config: &C,
    report: &R,
) -> CliResult<PathBuf> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        seed,
        config,
        report,
    };
    let path = with_suffix(base, "report.json");
    let mut text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| CliError::Numerical(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| io_err(&path, e))?;
        }
    }
    std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Write one CSV table to `<base>.<table>.csv`.
pub fn write_csv(
    base: &Path,
    table: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> CliResult<PathBuf> {
    let path = with_suffix(base, &format!("{table}.csv"));
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let escaped: Vec<String> = row.iter().map(|c| escape_csv(c)).collect();
        out.push_str(&escaped.join(","));
        out.push('\n');
    }
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| io_err(&path, e))?;
        }
    }
    std::fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    name.push('.');
    name.push_str(suffix);
    base.with_file_name(name)
}

fn escape_csv(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Shortest string that parses back to exactly `v`; the same rendering
/// serde_json uses, so CSV and JSON agree byte for byte.
pub fn num(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_else(|_| "null".to_string())
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Three-decimal rendering for terminal tables.
pub fn human(v: f64) -> String {
    format!("{v:.3}")
}

/// Print an aligned two-dimensional table to stdout.
pub fn print_table(header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let print_row = |cells: &[String]| {
        let line: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}", w = w))
            .collect();
        println!("{}", line.join("  "));
    };
    print_row(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    print_row(
        &widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>(),
    );
    for row in rows {
        print_row(row);
    }
    let _ = std::io::stdout().flush();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering_matches_json() {
        for v in [1.0, -3.414, 0.125, 1e-9, 2.414, f64::MIN_POSITIVE] {
            let json = serde_json::json!({ "v": v }).to_string();
            assert!(json.contains(&num(v)), "{json} vs {}", num(v));
        }
    }

    #[test]
    fn csv_cells_with_commas_are_quoted() {
        assert_eq!(escape_csv("a,b"), "\"a,b\"");
        assert_eq!(escape_csv("plain"), "plain");
        assert_eq!(escape_csv("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn suffixes_attach_to_the_base_name() {
        assert_eq!(
            with_suffix(Path::new("out/run1"), "report.json"),
            PathBuf::from("out/run1.report.json")
        );
        assert_eq!(
            with_suffix(Path::new("run1"), "hurst.csv"),
            PathBuf::from("run1.hurst.csv")
        );
    }
}
