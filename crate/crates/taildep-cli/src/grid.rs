//! Hurst-exponent simulation grid.
//!
//! One cell per (scheme value, anchor index, innovation plan,
//! perturbation). A cell runs the fixed-index window construction:
//! each replication draws `series_length` independent copies of the
//! windowed perturbed value at the anchor index, estimates the Hurst
//! exponent of that series, and the cell reports the mean over
//! replications. Cells run in parallel; failures are recorded per cell
//! and leave the rest of the grid intact.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use taildep::distributions::DistributionSpec;
use taildep::linear_process::{
    generate_coupled, CoefficientScheme, CoupledProcessConfig, InnovationPlan, WindowSpec,
};
use taildep::long_memory::hurst_rs;
use taildep::rng::SeedTree;

use crate::error::{config_err, CliResult};

fn default_indices() -> Vec<usize> {
    (1..=6).collect()
}
fn default_replications() -> usize {
    20
}
fn default_series_length() -> usize {
    1024
}
fn default_window_width() -> usize {
    5
}

/// Which coefficient family the scheme axis sweeps, and over which values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeAxis {
    pub family: SchemeFamily,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeFamily {
    Exponential,
    PowerLaw,
}

impl SchemeAxis {
    fn scheme(&self, value: f64) -> CoefficientScheme {
        match self.family {
            SchemeFamily::Exponential => CoefficientScheme::Exponential { phi: value },
            SchemeFamily::PowerLaw => CoefficientScheme::PowerLaw { beta: value },
        }
    }
}

/// Innovation axis entry: a plan plus an optional column label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnovationEntry {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(flatten)]
    pub plan: InnovationPlan,
}

/// Perturbation axis entry: a distribution plus an optional column label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationEntry {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(flatten)]
    pub spec: DistributionSpec,
}

pub fn spec_label(spec: &DistributionSpec) -> String {
    match spec {
        DistributionSpec::Pareto { shape, scale } => format!("pareto({shape},{scale})"),
        DistributionSpec::Cauchy { location, scale } => format!("cauchy({location},{scale})"),
        DistributionSpec::Weibull { shape, scale } => format!("weibull({shape},{scale})"),
        DistributionSpec::Frechet {
            location,
            shape,
            scale,
        } => format!("frechet({location},{shape},{scale})"),
    }
}

fn plan_label(plan: &InnovationPlan) -> String {
    match plan {
        InnovationPlan::Iid { spec } => spec_label(spec),
        InnovationPlan::PerIndex { specs } => {
            let parts: Vec<String> = specs.iter().map(spec_label).collect();
            format!("per_index({})", parts.join(";"))
        }
    }
}

impl InnovationEntry {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| plan_label(&self.plan))
    }
}

impl PerturbationEntry {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| spec_label(&self.spec))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub scheme: SchemeAxis,
    #[serde(default = "default_indices")]
    pub indices: Vec<usize>,
    pub innovations: Vec<InnovationEntry>,
    pub perturbations: Vec<PerturbationEntry>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_series_length")]
    pub series_length: usize,
    #[serde(default = "default_window_width")]
    pub window_width: usize,
    #[serde(default)]
    pub base_seed: Option<u64>,
}

impl GridConfig {
    pub fn validate(&self) -> CliResult<()> {
        let axes = [
            ("scheme.values", self.scheme.values.is_empty()),
            ("indices", self.indices.is_empty()),
            ("innovations", self.innovations.is_empty()),
            ("perturbations", self.perturbations.is_empty()),
        ];
        for (name, empty) in axes {
            if empty {
                return Err(config_err(format!("simulation grid axis '{name}' is empty")));
            }
        }
        if self.replications == 0 {
            return Err(config_err("replications must be at least 1"));
        }
        if self.series_length == 0 {
            return Err(config_err("series_length must be at least 1"));
        }
        if self.window_width == 0 {
            return Err(config_err("window_width must be at least 1"));
        }
        if let Some(&i) = self.indices.iter().find(|&&i| i == 0) {
            return Err(config_err(format!("anchor index {i} must be at least 1")));
        }
        Ok(())
    }
}

/// One grid cell: the mean Hurst exponent over replications, or the
/// reason it is missing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridCell {
    pub scheme_value: f64,
    pub index: usize,
    pub innovation: String,
    pub perturbation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridReport {
    pub replications: usize,
    pub series_length: usize,
    pub cells: Vec<GridCell>,
}

fn run_cell(
    config: &GridConfig,
    tree: &SeedTree,
    cell_index: usize,
    scheme_value: f64,
    anchor: usize,
    innovation: &InnovationEntry,
    perturbation: &PerturbationEntry,
) -> GridCell {
    let cell_tree = tree.child(cell_index as u64);
    let mut total = 0.0;
    for r in 0..config.replications {
        let run = CoupledProcessConfig {
            x_scheme: config.scheme.scheme(scheme_value),
            y_scheme: config.scheme.scheme(scheme_value),
            x_innovations: innovation.plan.clone(),
            y_innovations: innovation.plan.clone(),
            perturbation: perturbation.spec,
            truncation_order: config.window_width,
            horizon: config.series_length,
            window: Some(WindowSpec {
                index: anchor,
                width: config.window_width,
            }),
            seed: cell_tree.child(r as u64).master(),
        };
        let hurst = generate_coupled(&run).and_then(|s| hurst_rs(&s.y_star));
        match hurst {
            Ok(h) => total += h,
            Err(e) => {
                return GridCell {
                    scheme_value,
                    index: anchor,
                    innovation: innovation.label(),
                    perturbation: perturbation.label(),
                    hurst: None,
                    error: Some(format!("replication {r}: {e}")),
                }
            }
        }
    }
    GridCell {
        scheme_value,
        index: anchor,
        innovation: innovation.label(),
        perturbation: perturbation.label(),
        hurst: Some(total / config.replications as f64),
        error: None,
    }
}

/// Run every cell of the grid, in parallel, under one master seed.
pub fn run_simulation_grid(config: &GridConfig, seed: u64) -> CliResult<GridReport> {
    config.validate()?;
    let tree = SeedTree::new(seed);

    let mut specs = Vec::new();
    for &value in &config.scheme.values {
        for &anchor in &config.indices {
            for innovation in &config.innovations {
                for perturbation in &config.perturbations {
                    specs.push((value, anchor, innovation, perturbation));
                }
            }
        }
    }

    let cells: Vec<GridCell> = specs
        .par_iter()
        .enumerate()
        .map(|(idx, (value, anchor, innovation, perturbation))| {
            run_cell(config, &tree, idx, *value, *anchor, innovation, perturbation)
        })
        .collect();

    Ok(GridReport {
        replications: config.replications,
        series_length: config.series_length,
        cells,
    })
}

/// Wide layout: rows are (scheme value, index), one column per
/// innovation/perturbation pair. Failed cells are left empty.
pub fn grid_table(config: &GridConfig, report: &GridReport) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["scheme_value".to_string(), "index".to_string()];
    for innovation in &config.innovations {
        for perturbation in &config.perturbations {
            header.push(format!("{}/{}", innovation.label(), perturbation.label()));
        }
    }
    let per_row = config.innovations.len() * config.perturbations.len();
    let mut rows = Vec::new();
    for chunk in report.cells.chunks(per_row) {
        let mut row = vec![
            crate::emit::num(chunk[0].scheme_value),
            chunk[0].index.to_string(),
        ];
        for cell in chunk {
            row.push(crate::emit::opt_num(cell.hurst));
        }
        rows.push(row);
    }
    (header, rows)
}
