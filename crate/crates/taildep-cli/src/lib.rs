//! Command-line front end: ingestion, configuration, simulation grids,
//! and report emission.
//!
//! Every subcommand accepts `--config <file>` (TOML, schema-versioned)
//! with flag overrides, writes `<out>.report.json` plus one CSV per
//! table, and prints a 3-decimal summary table. Stochastic commands
//! require a seed; re-running any invocation with the same inputs
//! produces byte-identical machine output.

pub mod config;
pub mod emit;
pub mod error;
pub mod grid;
pub mod ingest;
pub mod pipeline;
pub mod terms;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use taildep::dip::dip_test;
use taildep::distributions::{fit_mle, FitResult};
use taildep::long_memory::{memory_report, Classification};
use taildep::rng::SeedTree;
use taildep::tail_bounds::{LinearCombinationSpec, TailSlopeReport};
use taildep::tail_cc::tail_cc_profile;

use crate::emit::{human, num, opt_num, print_table, write_csv, write_report};
use crate::error::{config_err, from_lib, CliError, CliResult};
use crate::grid::{grid_table, run_simulation_grid, GridConfig};
use crate::ingest::{ingest_csv, ColumnSpec, PriceTable};
use crate::pipeline::{
    parse_family, run_empirical_pipeline, FamilyFit, PipelineConfig, PipelineReport,
};

#[derive(Parser)]
#[command(
    name = "taildep",
    version,
    about = "Heavy-tailed time-series analysis: tail bounds, coupled simulations, tail cross-correlation, memory and structure diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tail-slope bounds of a linear combination of heavy-tailed terms
    Bounds(BoundsArgs),
    /// Hurst-exponent grid over scheme values, indices, innovations and perturbations
    Simulate(SimulateArgs),
    /// Tail cross-correlation profile between two columns
    Tailcc(TailccArgs),
    /// Hurst and log-periodogram memory diagnostics per column
    Memory(MemoryArgs),
    /// Maximum-likelihood distribution fits with AIC/BIC ranking
    Fit(FitArgs),
    /// Dip test of unimodality with bootstrap calibration
    Dip(DipArgs),
    /// Distributional change points by binary segmentation
    Changepoint(ChangepointArgs),
    /// Full empirical report over a price table
    Pipeline(PipelineArgs),
}

/// Parse arguments and run; the return value is the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Cmd::Bounds(args) => cmd_bounds(args),
        Cmd::Simulate(args) => cmd_simulate(args),
        Cmd::Tailcc(args) => cmd_tailcc(args),
        Cmd::Memory(args) => cmd_memory(args),
        Cmd::Fit(args) => cmd_fit(args),
        Cmd::Dip(args) => cmd_dip(args),
        Cmd::Changepoint(args) => cmd_changepoint(args),
        Cmd::Pipeline(args) => cmd_pipeline(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn out_base(out: Option<PathBuf>, command: &str) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from(command))
}

fn parse_usize_list(text: &str, what: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| config_err(format!("{what}: cannot parse '{}' as an integer", p.trim())))
        })
        .collect()
}

fn parse_f64_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| config_err(format!("{what}: cannot parse '{}' as a number", p.trim())))
        })
        .collect()
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::Short => "short",
        Classification::Long => "long",
        Classification::Unknown => "unknown",
    }
}

fn load_table(
    input: &Option<String>,
    timestamp_column: &Option<String>,
    prices: Vec<String>,
) -> CliResult<PriceTable> {
    let input = input
        .as_deref()
        .ok_or_else(|| config_err("no input file; pass --input or set it in the config"))?;
    let spec = ColumnSpec {
        timestamp: timestamp_column.clone(),
        prices,
    };
    ingest_csv(Path::new(input), &spec)
}

// ---------------------------------------------------------------- bounds

#[derive(Args)]
struct BoundsArgs {
    /// Term of the linear combination, `COEFF*FAMILY(ARGS)`; repeatable
    #[arg(long = "term")]
    terms: Vec<String>,
    /// Also draw a sample of this size and fit the empirical tail slope
    #[arg(long)]
    sample_size: Option<usize>,
    /// Fraction of the sample treated as the tail
    #[arg(long)]
    tail_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base path for report files
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsConfig {
    #[serde(default)]
    terms: Vec<String>,
    #[serde(default)]
    sample_size: Option<usize>,
    #[serde(default = "default_tail_fraction")]
    tail_fraction: f64,
    #[serde(default)]
    seed: Option<u64>,
}

fn default_tail_fraction() -> f64 {
    0.02
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            terms: Vec::new(),
            sample_size: None,
            tail_fraction: default_tail_fraction(),
            seed: None,
        }
    }
}

fn cmd_bounds(args: BoundsArgs) -> CliResult<()> {
    let mut cfg: BoundsConfig =
        config::load_or_default(args.config.as_deref(), "bounds", BoundsConfig::default())?;
    if !args.terms.is_empty() {
        cfg.terms = args.terms;
    }
    if args.sample_size.is_some() {
        cfg.sample_size = args.sample_size;
    }
    if let Some(tf) = args.tail_fraction {
        cfg.tail_fraction = tf;
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }

    if cfg.terms.is_empty() {
        return Err(config_err("no terms; pass --term at least once"));
    }
    let parsed: Vec<_> = cfg
        .terms
        .iter()
        .map(|t| terms::parse_term(t))
        .collect::<CliResult<_>>()?;
    let spec = LinearCombinationSpec::new(parsed).map_err(from_lib)?;

    let (report, seed) = match cfg.sample_size {
        Some(n) => {
            let seed = cfg
                .seed
                .ok_or_else(|| config_err("sampling is stochastic; --seed is required"))?;
            let sample = spec.sample(n, &SeedTree::new(seed)).map_err(from_lib)?;
            let report = TailSlopeReport::with_sample(&spec, &sample, cfg.tail_fraction)
                .map_err(from_lib)?;
            (report, Some(seed))
        }
        None => (TailSlopeReport::from_spec(&spec).map_err(from_lib)?, None),
    };

    let base = out_base(args.out, "bounds");
    write_report(&base, "bounds", seed, &cfg, &report)?;
    let mut rows = vec![
        vec!["slope_dominant".to_string(), num(report.slope_dominant)],
        vec!["slope_sum".to_string(), num(report.slope_sum)],
        vec!["slope_moment".to_string(), num(report.slope_moment)],
    ];
    if let Some(e) = report.empirical_slope {
        rows.push(vec!["empirical_slope".to_string(), num(e)]);
    }
    if let Some(t) = report.threshold {
        rows.push(vec!["threshold".to_string(), num(t)]);
    }
    write_csv(&base, "slopes", &["quantity", "value"], &rows)?;

    let human_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r[0].clone(), human(r[1].parse::<f64>().unwrap_or(f64::NAN))])
        .collect();
    print_table(&["quantity", "value"], &human_rows);
    Ok(())
}

// -------------------------------------------------------------- simulate

#[derive(Args)]
struct SimulateArgs {
    /// TOML file with a [simulate] section describing the grid
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    series_length: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    let mut cfg: GridConfig = config::load_section(&args.config, "simulate")?;
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    if let Some(l) = args.series_length {
        cfg.series_length = l;
    }
    let seed = args.seed.or(cfg.base_seed).ok_or_else(|| {
        config_err("the grid is stochastic; pass --seed or set base_seed in the config")
    })?;
    cfg.base_seed = Some(seed);

    let report = run_simulation_grid(&cfg, seed)?;
    let base = out_base(args.out, "simulate");
    write_report(&base, "simulate", Some(seed), &cfg, &report)?;
    let (header, rows) = grid_table(&cfg, &report);
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(&base, "hurst", &header_refs, &rows)?;

    let human_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(i, c)| {
                    if i < 2 || c.is_empty() {
                        c.clone()
                    } else {
                        human(c.parse::<f64>().unwrap_or(f64::NAN))
                    }
                })
                .collect()
        })
        .collect();
    print_table(&header_refs, &human_rows);
    let failed = report.cells.iter().filter(|c| c.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} cells failed; see the report", report.cells.len());
    }
    Ok(())
}

// ---------------------------------------------------------------- tailcc

#[derive(Args)]
struct TailccArgs {
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    timestamp_column: Option<String>,
    #[arg(long)]
    x_column: Option<String>,
    #[arg(long)]
    y_column: Option<String>,
    /// Comma-separated lags
    #[arg(long)]
    lags: Option<String>,
    /// Comma-separated quantile levels; the profile runs over their square
    #[arg(long)]
    quantiles: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailccConfig {
    #[serde(default)]
    input: Option<String>,
    #[serde(default)]
    timestamp_column: Option<String>,
    #[serde(default)]
    x_column: Option<String>,
    #[serde(default)]
    y_column: Option<String>,
    #[serde(default = "default_lags")]
    lags: Vec<usize>,
    #[serde(default = "default_quantiles")]
    quantiles: Vec<f64>,
}

fn default_lags() -> Vec<usize> {
    vec![1, 3, 5, 7, 30, 100]
}
fn default_quantiles() -> Vec<f64> {
    vec![0.75, 0.85, 0.95]
}

impl Default for TailccConfig {
    fn default() -> Self {
        TailccConfig {
            input: None,
            timestamp_column: None,
            x_column: None,
            y_column: None,
            lags: default_lags(),
            quantiles: default_quantiles(),
        }
    }
}

#[derive(Debug, Serialize)]
struct TailccReport {
    x: String,
    y: String,
    cells: Vec<taildep::tail_cc::ProfileCell>,
}

const TAILCC_HEADER: [&str; 13] = [
    "x",
    "y",
    "lag",
    "qx",
    "qy",
    "tau",
    "threshold_x",
    "threshold_y",
    "n_exceed_x",
    "n_exceed_y_marginal",
    "n_joint",
    "n_pairs",
    "error",
];

fn tailcc_csv_row(x: &str, y: &str, cell: &taildep::tail_cc::ProfileCell) -> Vec<String> {
    let mut row = vec![
        x.to_string(),
        y.to_string(),
        cell.lag.to_string(),
        num(cell.qx),
        num(cell.qy),
    ];
    match &cell.estimate {
        Some(e) => {
            row.extend([
                num(e.tau),
                num(e.threshold_x),
                num(e.threshold_y),
                e.n_exceed_x.to_string(),
                e.n_exceed_y_marginal.to_string(),
                e.n_joint.to_string(),
                e.n_pairs.to_string(),
                String::new(),
            ]);
        }
        None => {
            row.extend(std::iter::repeat_with(String::new).take(7));
            row.push(cell.error.clone().unwrap_or_default());
        }
    }
    row
}

fn cmd_tailcc(args: TailccArgs) -> CliResult<()> {
    let mut cfg: TailccConfig =
        config::load_or_default(args.config.as_deref(), "tailcc", TailccConfig::default())?;
    if args.input.is_some() {
        cfg.input = args.input;
    }
    if args.timestamp_column.is_some() {
        cfg.timestamp_column = args.timestamp_column;
    }
    if args.x_column.is_some() {
        cfg.x_column = args.x_column;
    }
    if args.y_column.is_some() {
        cfg.y_column = args.y_column;
    }
    if let Some(lags) = &args.lags {
        cfg.lags = parse_usize_list(lags, "--lags")?;
    }
    if let Some(qs) = &args.quantiles {
        cfg.quantiles = parse_f64_list(qs, "--quantiles")?;
    }

    let x_name = cfg
        .x_column
        .clone()
        .ok_or_else(|| config_err("missing --x-column"))?;
    let y_name = cfg
        .y_column
        .clone()
        .ok_or_else(|| config_err("missing --y-column"))?;
    let prices = if x_name == y_name {
        vec![x_name.clone()]
    } else {
        vec![x_name.clone(), y_name.clone()]
    };
    let table = load_table(&cfg.input, &cfg.timestamp_column, prices)?;
    let x = table.column(&x_name).expect("requested column was ingested");
    let y = table.column(&y_name).expect("requested column was ingested");

    let pairs: Vec<(f64, f64)> = cfg
        .quantiles
        .iter()
        .flat_map(|&qx| cfg.quantiles.iter().map(move |&qy| (qx, qy)))
        .collect();
    let cells = tail_cc_profile(x, y, &cfg.lags, &pairs);
    let report = TailccReport {
        x: x_name.clone(),
        y: y_name.clone(),
        cells,
    };

    let base = out_base(args.out, "tailcc");
    write_report(&base, "tailcc", None, &cfg, &report)?;
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| tailcc_csv_row(&report.x, &report.y, c))
        .collect();
    write_csv(&base, "tailcc", &TAILCC_HEADER, &rows)?;

    let human_rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            vec![
                c.lag.to_string(),
                human(c.qx),
                human(c.qy),
                c.estimate
                    .as_ref()
                    .map(|e| human(e.tau))
                    .unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    print_table(&["lag", "qx", "qy", "tau"], &human_rows);
    Ok(())
}

// ---------------------------------------------------------------- memory

#[derive(Args)]
struct MemoryArgs {
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    timestamp_column: Option<String>,
    /// Column to analyse; repeatable, default all columns
    #[arg(long = "column")]
    columns: Vec<String>,
    #[arg(long)]
    bandwidth_exponent: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemoryConfig {
    #[serde(default)]
    input: Option<String>,
    #[serde(default)]
    timestamp_column: Option<String>,
    #[serde(default)]
    columns: Vec<String>,
    #[serde(default = "default_bandwidth_exponent")]
    bandwidth_exponent: f64,
}

fn default_bandwidth_exponent() -> f64 {
    0.5
}

impl Default for MemoryConfig {
    fn default() -> Self {
        MemoryConfig {
            input: None,
            timestamp_column: None,
            columns: Vec::new(),
            bandwidth_exponent: default_bandwidth_exponent(),
        }
    }
}

const MEMORY_HEADER: [&str; 6] = [
    "series",
    "hurst",
    "gph_d",
    "gph_se",
    "gph_bandwidth",
    "classification",
];

fn memory_csv_row(series: &str, r: &taildep::long_memory::MemoryReport) -> Vec<String> {
    vec![
        series.to_string(),
        num(r.hurst),
        num(r.gph_d),
        num(r.gph_se),
        r.gph_bandwidth.to_string(),
        classification_name(r.classification).to_string(),
    ]
}

fn cmd_memory(args: MemoryArgs) -> CliResult<()> {
    let mut cfg: MemoryConfig =
        config::load_or_default(args.config.as_deref(), "memory", MemoryConfig::default())?;
    if args.input.is_some() {
        cfg.input = args.input;
    }
    if args.timestamp_column.is_some() {
        cfg.timestamp_column = args.timestamp_column;
    }
    if !args.columns.is_empty() {
        cfg.columns = args.columns;
    }
    if let Some(b) = args.bandwidth_exponent {
        cfg.bandwidth_exponent = b;
    }

    let table = load_table(&cfg.input, &cfg.timestamp_column, cfg.columns.clone())?;
    let mut rows = Vec::new();
    for (name, values) in &table.columns {
        let report = memory_report(values, cfg.bandwidth_exponent).map_err(from_lib)?;
        rows.push(pipeline::MemoryRow {
            series: name.clone(),
            report,
        });
    }

    let base = out_base(args.out, "memory");
    write_report(&base, "memory", None, &cfg, &rows)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| memory_csv_row(&r.series, &r.report))
        .collect();
    write_csv(&base, "memory", &MEMORY_HEADER, &csv_rows)?;

    let human_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.series.clone(),
                human(r.report.hurst),
                human(r.report.gph_d),
                human(r.report.gph_se),
                r.report.gph_bandwidth.to_string(),
                classification_name(r.report.classification).to_string(),
            ]
        })
        .collect();
    print_table(&MEMORY_HEADER, &human_rows);
    Ok(())
}

// ------------------------------------------------------------------- fit

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    timestamp_column: Option<String>,
    #[arg(long)]
    column: Option<String>,
    /// Comma-separated families to fit
    #[arg(long)]
    families: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitConfig {
    #[serde(default)]
    input: Option<String>,
    #[serde(default)]
    timestamp_column: Option<String>,
    #[serde(default)]
    column: Option<String>,
    #[serde(default = "default_fit_families")]
    families: Vec<String>,
}

fn default_fit_families() -> Vec<String> {
    vec![
        "pareto".into(),
        "cauchy".into(),
        "weibull".into(),
        "frechet".into(),
    ]
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            input: None,
            timestamp_column: None,
            column: None,
            families: default_fit_families(),
        }
    }
}

#[derive(Debug, Serialize)]
struct FitReport {
    series: String,
    sample_size: usize,
    fits: Vec<FamilyFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best: Option<FitResult>,
}

fn spec_params(
    spec: &taildep::distributions::DistributionSpec,
) -> (Option<f64>, Option<f64>, Option<f64>) {
    use taildep::distributions::DistributionSpec as D;
    match *spec {
        D::Pareto { shape, scale } => (None, Some(shape), Some(scale)),
        D::Cauchy { location, scale } => (Some(location), None, Some(scale)),
        D::Weibull { shape, scale } => (None, Some(shape), Some(scale)),
        D::Frechet {
            location,
            shape,
            scale,
        } => (Some(location), Some(shape), Some(scale)),
    }
}

const FIT_HEADER: [&str; 8] = [
    "family",
    "location",
    "shape",
    "scale",
    "log_likelihood",
    "aic",
    "bic",
    "error",
];

fn fit_csv_row(f: &FamilyFit) -> Vec<String> {
    match &f.fit {
        Some(fit) => {
            let (location, shape, scale) = spec_params(&fit.spec);
            vec![
                f.family.clone(),
                opt_num(location),
                opt_num(shape),
                opt_num(scale),
                num(fit.log_likelihood),
                num(fit.aic),
                num(fit.bic),
                String::new(),
            ]
        }
        None => vec![
            f.family.clone(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            f.error.clone().unwrap_or_default(),
        ],
    }
}

fn cmd_fit(args: FitArgs) -> CliResult<()> {
    let mut cfg: FitConfig =
        config::load_or_default(args.config.as_deref(), "fit", FitConfig::default())?;
    if args.input.is_some() {
        cfg.input = args.input;
    }
    if args.timestamp_column.is_some() {
        cfg.timestamp_column = args.timestamp_column;
    }
    if args.column.is_some() {
        cfg.column = args.column;
    }
    if let Some(fams) = &args.families {
        cfg.families = fams.split(',').map(|s| s.trim().to_string()).collect();
    }

    let column = cfg
        .column
        .clone()
        .ok_or_else(|| config_err("missing --column"))?;
    let families = cfg
        .families
        .iter()
        .map(|f| parse_family(f))
        .collect::<CliResult<Vec<_>>>()?;
    let table = load_table(&cfg.input, &cfg.timestamp_column, vec![column.clone()])?;
    let values = table.column(&column).expect("requested column was ingested");

    let fits: Vec<FamilyFit> = families
        .iter()
        .map(|&family| match fit_mle(values, family) {
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
    if best.is_none() {
        let reasons: Vec<String> = fits
            .iter()
            .filter_map(|f| f.error.clone())
            .collect();
        return Err(CliError::Numerical(format!(
            "every fit failed: {}",
            reasons.join("; ")
        )));
    }
    let report = FitReport {
        series: column.clone(),
        sample_size: values.len(),
        fits,
        best,
    };

    let base = out_base(args.out, "fit");
    write_report(&base, "fit", None, &cfg, &report)?;
    let rows: Vec<Vec<String>> = report.fits.iter().map(fit_csv_row).collect();
    write_csv(&base, "fits", &FIT_HEADER, &rows)?;

    let mut ranked: Vec<&FamilyFit> = report.fits.iter().filter(|f| f.fit.is_some()).collect();
    ranked.sort_by(|a, b| {
        a.fit
            .as_ref()
            .unwrap()
            .aic
            .total_cmp(&b.fit.as_ref().unwrap().aic)
    });
    let human_rows: Vec<Vec<String>> = ranked
        .iter()
        .map(|f| {
            let fit = f.fit.as_ref().unwrap();
            let (location, shape, scale) = spec_params(&fit.spec);
            vec![
                f.family.clone(),
                location.map(human).unwrap_or_default(),
                shape.map(human).unwrap_or_default(),
                scale.map(human).unwrap_or_default(),
                human(fit.aic),
                human(fit.bic),
            ]
        })
        .collect();
    print_table(&["family", "location", "shape", "scale", "aic", "bic"], &human_rows);
    Ok(())
}

// ------------------------------------------------------------------- dip

#[derive(Args)]
struct DipArgs {
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    timestamp_column: Option<String>,
    #[arg(long)]
    column: Option<String>,
    #[arg(long)]
    n_bootstrap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DipConfig {
    #[serde(default)]
    input: Option<String>,
    #[serde(default)]
    timestamp_column: Option<String>,
    #[serde(default)]
    column: Option<String>,
    #[serde(default = "default_n_bootstrap")]
    n_bootstrap: usize,
    #[serde(default)]
    seed: Option<u64>,
}

fn default_n_bootstrap() -> usize {
    2000
}

impl Default for DipConfig {
    fn default() -> Self {
        DipConfig {
            input: None,
            timestamp_column: None,
            column: None,
            n_bootstrap: default_n_bootstrap(),
            seed: None,
        }
    }
}

fn cmd_dip(args: DipArgs) -> CliResult<()> {
    let mut cfg: DipConfig =
        config::load_or_default(args.config.as_deref(), "dip", DipConfig::default())?;
    if args.input.is_some() {
        cfg.input = args.input;
    }
    if args.timestamp_column.is_some() {
        cfg.timestamp_column = args.timestamp_column;
    }
    if args.column.is_some() {
        cfg.column = args.column;
    }
    if let Some(n) = args.n_bootstrap {
        cfg.n_bootstrap = n;
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }

    let column = cfg
        .column
        .clone()
        .ok_or_else(|| config_err("missing --column"))?;
    let seed = cfg.seed.ok_or_else(|| {
        config_err("the bootstrap is stochastic; --seed is required")
    })?;
    let table = load_table(&cfg.input, &cfg.timestamp_column, vec![column.clone()])?;
    let values = table.column(&column).expect("requested column was ingested");
    let result = dip_test(values, cfg.n_bootstrap, seed).map_err(from_lib)?;

    let base = out_base(args.out, "dip");
    write_report(&base, "dip", Some(seed), &cfg, &result)?;
    let rows = vec![vec![
        num(result.statistic),
        num(result.p_value),
        result.n_bootstrap.to_string(),
    ]];
    write_csv(&base, "dip", &["statistic", "p_value", "n_bootstrap"], &rows)?;
    print_table(
        &["statistic", "p_value", "n_bootstrap"],
        &[vec![
            human(result.statistic),
            human(result.p_value),
            result.n_bootstrap.to_string(),
        ]],
    );
    Ok(())
}

// ----------------------------------------------------------- changepoint

#[derive(Args)]
struct ChangepointArgs {
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    timestamp_column: Option<String>,
    #[arg(long)]
    column: Option<String>,
    #[arg(long)]
    max_changepoints: Option<usize>,
    #[arg(long)]
    min_segment: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChangepointConfig {
    #[serde(default)]
    input: Option<String>,
    #[serde(default)]
    timestamp_column: Option<String>,
    #[serde(default)]
    column: Option<String>,
    #[serde(default = "default_max_changepoints")]
    max_changepoints: usize,
    #[serde(default = "default_min_segment")]
    min_segment: usize,
}

fn default_max_changepoints() -> usize {
    5
}
fn default_min_segment() -> usize {
    taildep::changepoint::DEFAULT_MIN_SEGMENT
}

impl Default for ChangepointConfig {
    fn default() -> Self {
        ChangepointConfig {
            input: None,
            timestamp_column: None,
            column: None,
            max_changepoints: default_max_changepoints(),
            min_segment: default_min_segment(),
        }
    }
}

fn cmd_changepoint(args: ChangepointArgs) -> CliResult<()> {
    let mut cfg: ChangepointConfig = config::load_or_default(
        args.config.as_deref(),
        "changepoint",
        ChangepointConfig::default(),
    )?;
    if args.input.is_some() {
        cfg.input = args.input;
    }
    if args.timestamp_column.is_some() {
        cfg.timestamp_column = args.timestamp_column;
    }
    if args.column.is_some() {
        cfg.column = args.column;
    }
    if let Some(m) = args.max_changepoints {
        cfg.max_changepoints = m;
    }
    if let Some(m) = args.min_segment {
        cfg.min_segment = m;
    }

    let column = cfg
        .column
        .clone()
        .ok_or_else(|| config_err("missing --column"))?;
    let table = load_table(&cfg.input, &cfg.timestamp_column, vec![column.clone()])?;
    let values = table.column(&column).expect("requested column was ingested");
    let result =
        taildep::changepoint::detect_changepoints(values, cfg.max_changepoints, cfg.min_segment)
            .map_err(from_lib)?;

    let base = out_base(args.out, "changepoint");
    write_report(&base, "changepoint", None, &cfg, &result)?;
    let rows: Vec<Vec<String>> = result
        .discovery_order
        .iter()
        .zip(&result.statistic_per_split)
        .enumerate()
        .map(|(k, (loc, stat))| vec![(k + 1).to_string(), loc.to_string(), num(*stat)])
        .collect();
    write_csv(
        &base,
        "changepoints",
        &["discovery_position", "location", "statistic"],
        &rows,
    )?;

    let human_rows: Vec<Vec<String>> = result
        .discovery_order
        .iter()
        .zip(&result.statistic_per_split)
        .enumerate()
        .map(|(k, (loc, stat))| vec![(k + 1).to_string(), loc.to_string(), human(*stat)])
        .collect();
    print_table(&["discovery_position", "location", "statistic"], &human_rows);
    println!(
        "{} change points; segments: {}",
        result.locations.len(),
        result
            .segment_bounds(values.len())
            .iter()
            .map(|(a, b)| format!("{}-{}", a + 1, b))
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(())
}

// -------------------------------------------------------------- pipeline

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn pipeline_csv_tables(base: &Path, report: &PipelineReport, cfg: &PipelineConfig) -> CliResult<()> {
    let structure_rows: Vec<Vec<String>> = report
        .structure
        .rows
        .iter()
        .map(|r| {
            vec![
                r.series.clone(),
                num(r.dip.statistic),
                num(r.dip.p_value),
                r.changepoints.locations.len().to_string(),
                r.changepoints
                    .discovery_order
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                r.changepoints
                    .locations
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            ]
        })
        .collect();
    write_csv(
        base,
        "structure",
        &[
            "series",
            "dip_statistic",
            "dip_p_value",
            "n_changepoints",
            "locations_by_discovery",
            "locations_sorted",
        ],
        &structure_rows,
    )?;

    let mut fit_header: Vec<String> = vec![
        "series".into(),
        "segment".into(),
        "start".into(),
        "end".into(),
    ];
    for family in &cfg.families {
        fit_header.push(format!("{family}_aic"));
        fit_header.push(format!("{family}_bic"));
    }
    fit_header.extend([
        "best_family".to_string(),
        "best_location".to_string(),
        "best_shape".to_string(),
        "best_scale".to_string(),
    ]);
    let fit_rows: Vec<Vec<String>> = report
        .segment_fits
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.series.clone(),
                r.segment.to_string(),
                r.start.to_string(),
                r.end.to_string(),
            ];
            for family in &cfg.families {
                let fit = r
                    .fits
                    .iter()
                    .find(|f| &f.family == family)
                    .and_then(|f| f.fit.as_ref());
                row.push(fit.map(|f| num(f.aic)).unwrap_or_default());
                row.push(fit.map(|f| num(f.bic)).unwrap_or_default());
            }
            match &r.best {
                Some(best) => {
                    let (location, shape, scale) = spec_params(&best.spec);
                    row.push(best.spec.family().name().to_string());
                    row.push(opt_num(location));
                    row.push(opt_num(shape));
                    row.push(opt_num(scale));
                }
                None => row.extend([String::new(), String::new(), String::new(), String::new()]),
            }
            row
        })
        .collect();
    let fit_header_refs: Vec<&str> = fit_header.iter().map(|s| s.as_str()).collect();
    write_csv(base, "segment_fits", &fit_header_refs, &fit_rows)?;

    let memory_rows: Vec<Vec<String>> = report
        .memory
        .rows
        .iter()
        .map(|r| memory_csv_row(&r.series, &r.report))
        .collect();
    write_csv(base, "memory", &MEMORY_HEADER, &memory_rows)?;

    let mut cc_rows = Vec::new();
    for row in &report.tail_cc.rows {
        for cell in &row.cells {
            cc_rows.push(tailcc_csv_row(&row.x, &row.y, cell));
        }
    }
    write_csv(base, "tailcc", &TAILCC_HEADER, &cc_rows)?;
    Ok(())
}

fn cmd_pipeline(args: PipelineArgs) -> CliResult<()> {
    let mut cfg: PipelineConfig = config::load_or_default(
        args.config.as_deref(),
        "pipeline",
        PipelineConfig::default(),
    )?;
    if args.input.is_some() {
        cfg.input = args.input;
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    let seed = cfg.seed.ok_or_else(|| {
        config_err("the dip bootstrap is stochastic; pass --seed or set it in the config")
    })?;
    cfg.seed = Some(seed);

    let table = load_table(&cfg.input, &cfg.timestamp_column, cfg.price_columns.clone())?;
    let report = run_empirical_pipeline(&table, &cfg, seed)?;

    let base = out_base(args.out, "pipeline");
    write_report(&base, "pipeline", Some(seed), &cfg, &report)?;
    pipeline_csv_tables(&base, &report, &cfg)?;

    for (name, section_error, n) in [
        ("structure", &report.structure.error, report.structure.rows.len()),
        (
            "segment_fits",
            &report.segment_fits.error,
            report.segment_fits.rows.len(),
        ),
        ("memory", &report.memory.error, report.memory.rows.len()),
        ("tail_cc", &report.tail_cc.error, report.tail_cc.rows.len()),
    ] {
        match section_error {
            Some(e) => println!("{name}: FAILED ({e})"),
            None => println!("{name}: {n} rows"),
        }
    }
    if !report.structure.rows.is_empty() {
        let human_rows: Vec<Vec<String>> = report
            .structure
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.series.clone(),
                    human(r.dip.statistic),
                    human(r.dip.p_value),
                    r.changepoints
                        .locations
                        .iter()
                        .map(|l| l.to_string())
                        .collect::<Vec<_>>()
                        .join(";"),
                ]
            })
            .collect();
        print_table(&["series", "dip", "p", "changepoints"], &human_rows);
    }

    if !report.any_section_succeeded() {
        return Err(CliError::Numerical(
            "every report section failed; see the report for details".into(),
        ));
    }
    Ok(())
}
