//! CSV ingestion for observed price series.
//!
//! Input files are UTF-8, comma-separated, with a header row. One column
//! holds timestamps, either integer epochs or ISO-8601 datetimes; every
//! other requested column is numeric. Timestamps must be strictly
//! increasing. All parse failures name the offending line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{data_err, CliResult};

/// Which columns to read. An empty `prices` list means every column
/// except the timestamp column, in header order.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub timestamp: Option<String>,
    pub prices: Vec<String>,
}

/// Aligned, validated series read from one file.
///
/// All columns have the same length and `timestamps` is strictly
/// increasing.
#[derive(Debug, Clone, Serialize)]
pub struct PriceTable {
    pub timestamps: Vec<i64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl PriceTable {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// Epoch value of one timestamp cell. Integer cells pass through
/// unchanged; datetime cells become epoch milliseconds.
fn parse_timestamp(cell: &str) -> Option<i64> {
    let cell = cell.trim();
    if let Ok(v) = cell.parse::<i64>() {
        return Some(v);
    }
    if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(cell) {
        return Some(dt.timestamp_millis());
    }
    if let Ok(dt) = chrono::NaiveDateTime::parse_from_str(cell, "%Y-%m-%dT%H:%M:%S%.f") {
        return Some(dt.and_utc().timestamp_millis());
    }
    if let Ok(dt) = chrono::NaiveDateTime::parse_from_str(cell, "%Y-%m-%d %H:%M:%S%.f") {
        return Some(dt.and_utc().timestamp_millis());
    }
    if let Ok(d) = chrono::NaiveDate::parse_from_str(cell, "%Y-%m-%d") {
        return Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis());
    }
    None
}

pub fn ingest_csv(path: &Path, spec: &ColumnSpec) -> CliResult<PriceTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| data_err(format!("cannot open {}: {e}", path.display())))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| data_err(format!("{}: cannot read header: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(data_err(format!("{}: empty header row", path.display())));
    }

    let find = |name: &str| -> CliResult<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            data_err(format!(
                "{}: column '{name}' not found; header has: {}",
                path.display(),
                headers.join(", ")
            ))
        })
    };

    let ts_idx = match &spec.timestamp {
        Some(name) => find(name)?,
        None => 0,
    };
    let price_idx: Vec<(String, usize)> = if spec.prices.is_empty() {
        headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ts_idx)
            .map(|(i, h)| (h.clone(), i))
            .collect()
    } else {
        spec.prices
            .iter()
            .map(|name| Ok((name.clone(), find(name)?)))
            .collect::<CliResult<_>>()?
    };
    if price_idx.is_empty() {
        return Err(data_err(format!(
            "{}: no price columns besides the timestamp column",
            path.display()
        )));
    }

    let mut timestamps: Vec<i64> = Vec::new();
    let mut columns: Vec<(String, Vec<f64>)> = price_idx
        .iter()
        .map(|(n, _)| (n.clone(), Vec::new()))
        .collect();

    for record in reader.records() {
        let record =
            record.map_err(|e| data_err(format!("{}: malformed row: {e}", path.display())))?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(timestamps.len() as u64 + 2);
        let cell = |idx: usize| -> CliResult<&str> {
            record.get(idx).ok_or_else(|| {
                data_err(format!(
                    "{}: line {line}: row has {} fields, expected {}",
                    path.display(),
                    record.len(),
                    headers.len()
                ))
            })
        };

        let ts_cell = cell(ts_idx)?;
        let ts = parse_timestamp(ts_cell).ok_or_else(|| {
            data_err(format!(
                "{}: line {line}, column '{}': cannot parse '{ts_cell}' as a timestamp",
                path.display(),
                headers[ts_idx]
            ))
        })?;
        if let Some(&prev) = timestamps.last() {
            if ts <= prev {
                return Err(data_err(format!(
                    "{}: line {line}: timestamps not strictly increasing ({prev} then {ts})",
                    path.display()
                )));
            }
        }
        timestamps.push(ts);

        for ((name, idx), (_, values)) in price_idx.iter().zip(columns.iter_mut()) {
            let raw = cell(*idx)?;
            let value: f64 = raw.parse().map_err(|_| {
                data_err(format!(
                    "{}: line {line}, column '{name}': cannot parse '{raw}' as a number",
                    path.display()
                ))
            })?;
            values.push(value);
        }
    }

    if timestamps.is_empty() {
        return Err(data_err(format!(
            "{}: no data rows after the header",
            path.display()
        )));
    }

    Ok(PriceTable {
        timestamps,
        columns,
    })
}
