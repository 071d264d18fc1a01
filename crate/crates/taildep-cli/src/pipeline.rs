//! Empirical analysis pipeline for observed price tables.
//!
//! Four sections run over the ingested columns: distribution-shape
//! structure (dip test and change points), per-segment distribution fits,
//! long-memory diagnostics, and pairwise tail cross-correlation profiles.
//! Sections fail independently: an error in one is recorded in the report
//! and the others still run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use taildep::changepoint::{detect_changepoints, ChangePointResult};
use taildep::dip::{dip_test, DipResult};
use taildep::distributions::{fit_mle, Family, FitResult};
use taildep::long_memory::{memory_report, MemoryReport};
use taildep::rng::SeedTree;
use taildep::tail_cc::{tail_cc_profile, ProfileCell};

use crate::error::{config_err, data_err, CliResult};
use crate::ingest::PriceTable;

fn default_max_changepoints() -> usize {
    5
}
fn default_min_segment() -> usize {
    100
}
fn default_n_bootstrap() -> usize {
    2000
}
fn default_bandwidth_exponent() -> f64 {
    0.5
}
fn default_families() -> Vec<String> {
    vec!["pareto".into(), "cauchy".into(), "weibull".into()]
}
fn default_lags() -> Vec<usize> {
    vec![1, 3, 5, 7, 30, 100]
}
fn default_quantiles() -> Vec<f64> {
    vec![0.75, 0.85, 0.95]
}

/// Minimum column length the pipeline accepts.
pub const MIN_ROWS: usize = 500;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub input: Option<String>,
    #[serde(default)]
    pub timestamp_column: Option<String>,
    #[serde(default)]
    pub price_columns: Vec<String>,
    #[serde(default = "default_max_changepoints")]
    pub max_changepoints: usize,
    #[serde(default = "default_min_segment")]
    pub min_segment: usize,
    #[serde(default = "default_n_bootstrap")]
    pub n_bootstrap: usize,
    #[serde(default = "default_bandwidth_exponent")]
    pub bandwidth_exponent: f64,
    #[serde(default = "default_families")]
    pub families: Vec<String>,
    #[serde(default = "default_lags")]
    pub lags: Vec<usize>,
    #[serde(default = "default_quantiles")]
    pub quantiles: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            timestamp_column: None,
            price_columns: Vec::new(),
            max_changepoints: default_max_changepoints(),
            min_segment: default_min_segment(),
            n_bootstrap: default_n_bootstrap(),
            bandwidth_exponent: default_bandwidth_exponent(),
            families: default_families(),
            lags: default_lags(),
            quantiles: default_quantiles(),
            seed: None,
        }
    }
}

pub fn parse_family(name: &str) -> CliResult<Family> {
    match name.to_ascii_lowercase().as_str() {
        "pareto" => Ok(Family::Pareto),
        "cauchy" => Ok(Family::Cauchy),
        "weibull" => Ok(Family::Weibull),
        "frechet" => Ok(Family::Frechet),
        other => Err(config_err(format!(
            "unknown family '{other}'; expected one of pareto, cauchy, weibull, frechet"
        ))),
    }
}

/// Structure section row: dip test plus change points for one series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureRow {
    pub series: String,
    pub dip: DipResult,
    pub changepoints: ChangePointResult,
}

/// One family's fit on one segment, or the reason it failed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFit {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Fits for one segment of one series. `start`/`end` are 1-based
/// inclusive row numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentFitRow {
    pub series: String,
    pub segment: usize,
    pub start: usize,
    pub end: usize,
    pub fits: Vec<FamilyFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best: Option<FitResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemoryRow {
    pub series: String,
    #[serde(flatten)]
    pub report: MemoryReport,
}

/// Tail cross-correlation profile for one ordered pair of series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailCCRow {
    pub x: String,
    pub y: String,
    pub cells: Vec<ProfileCell>,
}

/// A section's rows, or the error that took the whole section down.
/// Per-row failures are recorded inside the rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Section<T> {
    pub rows: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl<T> Section<T> {
    fn failed(msg: String) -> Self {
        Section {
            rows: Vec::new(),
            error: Some(msg),
        }
    }

    fn ok(rows: Vec<T>) -> Self {
        Section { rows, error: None }
    }

    pub fn succeeded(&self) -> bool {
        self.error.is_none() && !self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub n_rows: usize,
    pub columns: Vec<String>,
    pub structure: Section<StructureRow>,
    pub segment_fits: Section<SegmentFitRow>,
    pub memory: Section<MemoryRow>,
    pub tail_cc: Section<TailCCRow>,
}

fn structure_section(
    table: &PriceTable,
    config: &PipelineConfig,
    tree: &SeedTree,
) -> Section<StructureRow> {
    let rows: Vec<Result<StructureRow, String>> = table
        .columns
        .par_iter()
        .enumerate()
        .map(|(idx, (name, values))| {
            let dip = dip_test(
                values,
                config.n_bootstrap,
                tree.child(idx as u64).master(),
            )
            .map_err(|e| format!("{name}: dip: {e}"))?;
            let changepoints =
                detect_changepoints(values, config.max_changepoints, config.min_segment)
                    .map_err(|e| format!("{name}: change points: {e}"))?;
            Ok(StructureRow {
                series: name.clone(),
                dip,
                changepoints,
            })
        })
        .collect();
    collect_section(rows)
}

fn segment_fits_for(
    name: &str,
    values: &[f64],
    locations: &[usize],
    families: &[Family],
) -> Vec<SegmentFitRow> {
    let mut bounds = Vec::with_capacity(locations.len() + 1);
    let mut start = 0usize;
    for &loc in locations {
        bounds.push((start, loc));
        start = loc;
    }
    bounds.push((start, values.len()));
    bounds
        .iter()
        .enumerate()
        .map(|(k, &(start, end))| {
            let segment = &values[start..end];
            let fits: Vec<FamilyFit> = families
                .iter()
                .map(|&family| match fit_mle(segment, family) {
                    Ok(fit) => FamilyFit {
                        family: family.name().to_string(),
                        fit: Some(fit),
                        error: None,
                    },
                    Err(e) => FamilyFit {
                        family: family.name().to_string(),
                        fit: None,
                        error: Some(e.to_string()),
                    },
                })
                .collect();
            let best = fits
                .iter()
                .filter_map(|f| f.fit.clone())
                .min_by(|a, b| a.aic.total_cmp(&b.aic));
            SegmentFitRow {
                series: name.to_string(),
                segment: k + 1,
                start: start + 1,
                end,
                fits,
                best,
            }
        })
        .collect()
}

fn segment_fits_section(
    table: &PriceTable,
    structure: &Section<StructureRow>,
    config: &PipelineConfig,
) -> Section<SegmentFitRow> {
    let families: Vec<Family> = match config
        .families
        .iter()
        .map(|f| parse_family(f))
        .collect::<CliResult<Vec<_>>>()
    {
        Ok(f) => f,
        Err(e) => return Section::failed(e.message().to_string()),
    };
    if structure.error.is_some() {
        return Section::failed(
            "segment fits need change-point locations, and the structure section failed".into(),
        );
    }
    let rows: Vec<SegmentFitRow> = structure
        .rows
        .par_iter()
        .flat_map(|row| {
            let values = table.column(&row.series).unwrap_or(&[]);
            segment_fits_for(&row.series, values, &row.changepoints.locations, &families)
        })
        .collect();
    if rows.iter().all(|r| r.fits.iter().all(|f| f.fit.is_none())) {
        return Section::failed("every distribution fit failed on every segment".into());
    }
    Section::ok(rows)
}

fn memory_section(table: &PriceTable, config: &PipelineConfig) -> Section<MemoryRow> {
    let rows: Vec<Result<MemoryRow, String>> = table
        .columns
        .par_iter()
        .map(|(name, values)| {
            memory_report(values, config.bandwidth_exponent)
                .map(|report| MemoryRow {
                    series: name.clone(),
                    report,
                })
                .map_err(|e| format!("{name}: {e}"))
        })
        .collect();
    collect_section(rows)
}

fn tail_cc_section(table: &PriceTable, config: &PipelineConfig) -> Section<TailCCRow> {
    if table.columns.len() < 2 {
        return Section::failed(
            "tail cross-correlation needs at least two price columns".into(),
        );
    }
    let pairs: Vec<(f64, f64)> = config
        .quantiles
        .iter()
        .flat_map(|&qx| config.quantiles.iter().map(move |&qy| (qx, qy)))
        .collect();
    let mut jobs = Vec::new();
    for i in 0..table.columns.len() {
        for j in (i + 1)..table.columns.len() {
            jobs.push((i, j));
        }
    }
    let rows: Vec<TailCCRow> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let (xn, xv) = &table.columns[i];
            let (yn, yv) = &table.columns[j];
            TailCCRow {
                x: xn.clone(),
                y: yn.clone(),
                cells: tail_cc_profile(xv, yv, &config.lags, &pairs),
            }
        })
        .collect();
    Section::ok(rows)
}

fn collect_section<T: Send>(rows: Vec<Result<T, String>>) -> Section<T> {
    let mut ok = Vec::new();
    let mut errors = Vec::new();
    for row in rows {
        match row {
            Ok(r) => ok.push(r),
            Err(e) => errors.push(e),
        }
    }
    if ok.is_empty() {
        Section::failed(errors.join("; "))
    } else if errors.is_empty() {
        Section::ok(ok)
    } else {
        Section {
            rows: ok,
            error: Some(errors.join("; ")),
        }
    }
}

/// Run every section over the table. `seed` drives the dip bootstrap.
pub fn run_empirical_pipeline(
    table: &PriceTable,
    config: &PipelineConfig,
    seed: u64,
) -> CliResult<PipelineReport> {
    if let Some((name, values)) = table.columns.iter().find(|(_, v)| v.len() < MIN_ROWS) {
        return Err(data_err(format!(
            "column '{name}' has {} rows; the pipeline needs at least {MIN_ROWS}",
            values.len()
        )));
    }
    let tree = SeedTree::new(seed);
    let structure = structure_section(table, config, &tree);
    let segment_fits = segment_fits_section(table, &structure, config);
    let memory = memory_section(table, config);
    let tail_cc = tail_cc_section(table, config);
    Ok(PipelineReport {
        n_rows: table.len(),
        columns: table.column_names().iter().map(|s| s.to_string()).collect(),
        structure,
        segment_fits,
        memory,
        tail_cc,
    })
}

impl PipelineReport {
    /// True when at least one section produced usable rows.
    pub fn any_section_succeeded(&self) -> bool {
        self.structure.succeeded()
            || self.segment_fits.succeeded()
            || self.memory.succeeded()
            || self.tail_cc.succeeded()
    }
}
