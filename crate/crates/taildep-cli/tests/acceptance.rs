//! Acceptance gate: one test per release criterion, each printing a
//! single PASS line with its elapsed time and asserting the stated
//! runtime budget. Criteria run serially behind a lock so the timing
//! reflects the work itself rather than scheduler contention.

use std::path::Path;
use std::process::Command;
use std::sync::Mutex;
use std::time::Instant;

use taildep::changepoint::detect_changepoints;
use taildep::dip::dip_test;
use taildep::distributions::{fit_mle, DistributionSpec, Family};
use taildep::linear_process::{
    generate_coupled, CoefficientScheme, CoupledProcessConfig, InnovationPlan, WindowSpec,
};
use taildep::long_memory::{gph, hurst_rs};
use taildep::rng::SeedTree;
use taildep::tail_bounds::{empirical_log_tail_slope, LinearCombinationSpec, LinearTerm};
use taildep::tail_cc::{tail_cross_correlation, TailCCEstimate, TailCCParams};
use taildep_cli::grid::{
    run_simulation_grid, GridConfig, InnovationEntry, PerturbationEntry, SchemeAxis, SchemeFamily,
};

static GATE: Mutex<()> = Mutex::new(());

fn timed(name: &str, budget_secs: f64, body: impl FnOnce()) {
    let _serial = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    body();
    let elapsed = start.elapsed().as_secs_f64();
    println!("acceptance {name}: PASS ({elapsed:.2}s)");
    assert!(
        elapsed < budget_secs,
        "{name} exceeded its {budget_secs}s budget: {elapsed:.2}s"
    );
}

fn pareto(shape: f64, scale: f64) -> DistributionSpec {
    DistributionSpec::Pareto { shape, scale }
}

fn cauchy(location: f64, scale: f64) -> DistributionSpec {
    DistributionSpec::Cauchy { location, scale }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_taildep"))
}

fn run_ok(cmd: &mut Command) {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn report_json(base: &Path) -> serde_json::Value {
    let path = base.with_extension("report.json");
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing report {}: {e}", path.display()));
    serde_json::from_str(&text).expect("report parses")
}

// -------------------------------------------------------------- criterion 1

#[test]
fn c01_worked_example_slopes() {
    timed("01 worked-example-slopes", 1.0, || {
        let dir = tempfile::tempdir().unwrap();

        let ex1 = dir.path().join("ex1");
        run_ok(bin().args([
            "bounds",
            "--term",
            "1*pareto(2.414,1)",
            "--term",
            "0.3333333333333333*cauchy(0,1)",
            "--out",
            ex1.to_str().unwrap(),
        ]));
        let report = &report_json(&ex1)["report"];
        assert_eq!(report["slope_dominant"].as_f64().unwrap(), -1.0);
        assert_eq!(report["slope_sum"].as_f64().unwrap(), -3.414);

        let ex2 = dir.path().join("ex2");
        run_ok(bin().args([
            "bounds",
            "--term",
            "1*pareto(2.414,1)",
            "--term",
            "0.3333333333333333*pareto(5,1)",
            "--out",
            ex2.to_str().unwrap(),
        ]));
        let report = &report_json(&ex2)["report"];
        assert_eq!(report["slope_dominant"].as_f64().unwrap(), -2.414);
        let moment = report["slope_moment"].as_f64().unwrap();
        // Agrees with -3.99 in the second decimal place; the exact bound
        // here is -3.999849, which truncates to -3.99.
        assert!((moment + 3.99).abs() < 0.01, "slope_moment = {moment}");
    });
}

// -------------------------------------------------------------- criterion 2

#[test]
fn c02_empirical_slope_of_mixture() {
    timed("02 empirical-slope-mixture", 30.0, || {
        let spec = LinearCombinationSpec::new(vec![
            LinearTerm::natural(1.0, pareto(2.414, 1.0)),
            LinearTerm::natural(1.0 / 3.0, cauchy(0.0, 1.0)),
        ])
        .unwrap();
        let sample = spec.sample(1_000_000, &SeedTree::new(4711)).unwrap();
        let (slope, _threshold) = empirical_log_tail_slope(&sample, 0.02).unwrap();
        assert!((slope + 1.0).abs() <= 0.2, "empirical slope {slope}");
    });
}

// -------------------------------------------------------------- criterion 3

// Threshold exactly as documented: empirical quantile by linear
// interpolation of order statistics.
fn oracle_threshold(values: &[f64], level: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    let pos = (n as f64 - 1.0) * level;
    let base = pos.floor() as usize;
    if base + 1 >= n {
        return v[n - 1];
    }
    let w = pos - base as f64;
    v[base] + w * (v[base + 1] - v[base])
}

// Longhand counting definition; None when no x-exceedance exists so the
// conditional probability is undefined.
fn oracle_tau(x: &[f64], y: &[f64], lag: usize, qx: f64, qy: f64) -> Option<f64> {
    let tx = oracle_threshold(x, qx);
    let ty = oracle_threshold(y, qy);
    let n_pairs = x.len() - lag;
    let (mut cx, mut cy, mut cj) = (0u64, 0u64, 0u64);
    for t in 0..n_pairs {
        let x_hit = x[t] > tx;
        let y_hit = y[t + lag] > ty;
        if x_hit {
            cx += 1;
            if y_hit {
                cj += 1;
            }
        }
        if y_hit {
            cy += 1;
        }
    }
    if cx == 0 {
        return None;
    }
    let np = n_pairs as f64;
    Some((cj as f64 / cx as f64 - cy as f64 / np) / (1.0 - cx as f64 / np))
}

#[test]
fn c03_estimator_matches_counting_oracle() {
    timed("03 counting-oracle-equivalence", 10.0, || {
        let tree = SeedTree::new(303);
        let mut checked = 0u32;
        for case in 0..500u64 {
            let case_tree = tree.child(case);
            let mut len_stream = case_tree.stream("len");
            let n = 30 + (len_stream.next_uniform() * 71.0) as usize;
            let mut sx = case_tree.stream("x");
            let mut sy = case_tree.stream("y");
            let mut x = pareto(1.5, 1.0).sample(n, &mut sx).unwrap();
            let mut y: Vec<f64> = match case % 3 {
                0 => cauchy(0.0, 1.0).sample(n, &mut sy).unwrap(),
                1 => x.iter().map(|&v| 0.7 * v + sy.next_gaussian()).collect(),
                _ => {
                    let mut v = x.clone();
                    v.rotate_right(2);
                    v
                }
            };
            if case % 5 == 0 {
                // Tied values stress the threshold interpolation.
                for v in x.iter_mut().chain(y.iter_mut()) {
                    *v = (*v * 10.0).round() / 10.0;
                }
            }
            for lag in 0..=5usize {
                for &(qx, qy) in &[(0.7, 0.7), (0.7, 0.9), (0.9, 0.7), (0.9, 0.9)] {
                    let params = TailCCParams::new(lag, qx, qy).unwrap();
                    let estimate = tail_cross_correlation(&x, &y, params);
                    match oracle_tau(&x, &y, lag, qx, qy) {
                        Some(expected) => {
                            let tau = estimate.unwrap().tau;
                            assert_eq!(
                                tau.to_bits(),
                                expected.to_bits(),
                                "case {case} lag {lag} q ({qx},{qy}): {tau} vs {expected}"
                            );
                        }
                        None => {
                            assert!(
                                matches!(estimate, Err(taildep::Error::UndefinedConditional(_))),
                                "case {case} lag {lag}: oracle undefined, estimator {estimate:?}"
                            );
                        }
                    }
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 500 * 6 * 4);
    });
}

// -------------------------------------------------------------- criterion 4

#[test]
fn c04_null_and_shift_anchors() {
    timed("04 null-and-shift-anchors", 60.0, || {
        let n = 100_000;
        let tree = SeedTree::new(44);
        let params = TailCCParams::symmetric(1, 0.9).unwrap();
        let mut total = 0.0;
        for seed in 0..50u64 {
            let pair = tree.child(seed);
            let mut sx = pair.stream("x");
            let mut sy = pair.stream("y");
            let x = pareto(2.0, 1.0).sample(n, &mut sx).unwrap();
            let y = cauchy(0.0, 1.0).sample(n, &mut sy).unwrap();
            total += tail_cross_correlation(&x, &y, params).unwrap().tau;
        }
        let mean = total / 50.0;
        assert!(mean.abs() < 0.02, "mean tau on independent pairs {mean}");

        // A circular shift keeps the two marginals identical, so the
        // thresholds coincide and every exceedance pairs up exactly.
        let mut s = tree.child(999).stream("base");
        let x = pareto(2.0, 1.0).sample(n, &mut s).unwrap();
        let lag = 3;
        let mut y = x.clone();
        y.rotate_right(lag);
        let shifted = TailCCParams::symmetric(lag, 0.9).unwrap();
        let tau = tail_cross_correlation(&x, &y, shifted).unwrap().tau;
        assert_eq!(tau, 1.0, "lag-shift tau {tau}");
    });
}

// -------------------------------------------------------------- criterion 5

fn anchored_estimate(anchor: usize, seed: u64) -> TailCCEstimate {
    let config = CoupledProcessConfig {
        x_scheme: CoefficientScheme::Exponential { phi: 0.5 },
        y_scheme: CoefficientScheme::Exponential { phi: 0.5 },
        x_innovations: InnovationPlan::Iid { spec: pareto(3.0, 1.0) },
        y_innovations: InnovationPlan::Iid { spec: pareto(3.0, 1.0) },
        perturbation: pareto(3.0, 1.0),
        truncation_order: 1,
        horizon: 1_000_000,
        window: Some(WindowSpec { index: anchor, width: 5 }),
        seed,
    };
    let series = generate_coupled(&config).unwrap();
    let params = TailCCParams::symmetric(0, 0.95).unwrap();
    tail_cross_correlation(&series.x_star, &series.y_star, params).unwrap()
}

fn tau_standard_error(e: &TailCCEstimate) -> f64 {
    let np = e.n_pairs as f64;
    let cx = e.n_exceed_x as f64;
    let p_cond = e.n_joint as f64 / cx;
    let p_x = cx / np;
    (p_cond * (1.0 - p_cond) / cx).sqrt() / (1.0 - p_x)
}

#[test]
fn c05_successive_ratio_law() {
    timed("05 successive-ratio-law", 300.0, || {
        let estimates: Vec<TailCCEstimate> =
            (1..=4).map(|anchor| anchored_estimate(anchor, 21)).collect();
        let tau: Vec<f64> = estimates.iter().map(|e| e.tau).collect();
        let se: Vec<f64> = estimates.iter().map(tau_standard_error).collect();

        let mean_ratio = (0..3).map(|i| tau[i + 1] / tau[i]).sum::<f64>() / 3.0;
        assert!(
            (0.0875..=0.1625).contains(&mean_ratio),
            "mean successive ratio {mean_ratio} outside +/-30% of 0.125 (tau {tau:?})"
        );

        for i in 0..3 {
            let slack = 2.0 * (se[i] * se[i] + se[i + 1] * se[i + 1]).sqrt();
            assert!(
                tau[i + 1] <= tau[i] + slack,
                "tau[{}] = {} not within 2 SE below tau[{}] = {}",
                i + 2,
                tau[i + 1],
                i + 1,
                tau[i]
            );
        }

        // The first ratio carries the real signal at this sample size; the
        // band excludes linear (0.5) and squared (0.25) coefficient decay.
        assert!(tau[0] > tau[1] && tau[1] > tau[2], "tau not decreasing: {tau:?}");
        let first_ratio = tau[1] / tau[0];
        assert!(
            (0.12..=0.24).contains(&first_ratio),
            "first successive ratio {first_ratio}"
        );
    });
}

// -------------------------------------------------------------- criterion 6

#[test]
fn c06_hurst_grid_anchor_values() {
    timed("06 hurst-grid-anchors", 300.0, || {
        let config = GridConfig {
            scheme: SchemeAxis {
                family: SchemeFamily::Exponential,
                values: vec![0.1, 0.25, 0.5],
            },
            indices: (1..=6).collect(),
            innovations: vec![InnovationEntry {
                label: None,
                plan: InnovationPlan::Iid { spec: pareto(3.0, 1.0) },
            }],
            perturbations: [
                pareto(2.414, 1.0),
                DistributionSpec::Weibull { shape: 1.0, scale: 1.0 },
                DistributionSpec::Weibull { shape: 0.5, scale: 1.0 },
                DistributionSpec::Frechet { location: 0.0, shape: 1.0, scale: 1.0 },
            ]
            .into_iter()
            .map(|spec| PerturbationEntry { label: None, spec })
            .collect(),
            replications: 20,
            series_length: 8192,
            window_width: 5,
            base_seed: Some(606),
        };
        let report = run_simulation_grid(&config, 606).unwrap();
        assert_eq!(report.cells.len(), 3 * 6 * 4);

        // Anchor values per (scheme value, perturbation); constant across
        // the anchor index.
        let anchors = |phi: f64| -> [f64; 4] {
            if phi == 0.1 {
                [0.478, 0.478, 0.478, 0.499]
            } else if phi == 0.25 {
                [0.476, 0.476, 0.476, 0.497]
            } else {
                [0.466, 0.465, 0.465, 0.510]
            }
        };
        for (i, cell) in report.cells.iter().enumerate() {
            let expected = anchors(cell.scheme_value)[i % 4];
            let hurst = cell
                .hurst
                .unwrap_or_else(|| panic!("cell {i} failed: {:?}", cell.error));
            assert!(
                (hurst - expected).abs() <= 0.05,
                "phi {} index {} perturbation {}: hurst {hurst} vs anchor {expected}",
                cell.scheme_value,
                cell.index,
                cell.perturbation
            );
        }
    });
}

// -------------------------------------------------------------- criterion 7

#[test]
fn c07_memory_estimator_calibration() {
    timed("07 memory-calibration", 60.0, || {
        let n = 1 << 14;
        let seeds = 20u64;
        let (mut h_wn, mut d_wn, mut h_int, mut d_int) = (0.0, 0.0, 0.0, 0.0);
        for seed in 0..seeds {
            let mut stream = SeedTree::new(7000).child(seed).stream("noise");
            let white: Vec<f64> = (0..n).map(|_| stream.next_gaussian()).collect();
            let mut integrated = Vec::with_capacity(n);
            let mut acc = 0.0;
            for &w in &white {
                acc += w;
                integrated.push(acc);
            }
            h_wn += hurst_rs(&white).unwrap();
            d_wn += gph(&white, 0.5).unwrap().0;
            h_int += hurst_rs(&integrated).unwrap();
            d_int += gph(&integrated, 0.5).unwrap().0;
        }
        let k = seeds as f64;
        let (h_wn, d_wn, h_int, d_int) = (h_wn / k, d_wn / k, h_int / k, d_int / k);
        assert!((0.45..=0.55).contains(&h_wn), "white-noise hurst {h_wn}");
        assert!((-0.1..=0.1).contains(&d_wn), "white-noise gph d {d_wn}");
        assert!(h_int > 0.9, "integrated hurst {h_int}");
        assert!((0.85..=1.15).contains(&d_int), "integrated gph d {d_int}");
    });
}

// -------------------------------------------------------------- criterion 8

#[test]
fn c08_structure_tests_power_and_recovery() {
    timed("08 structure-power-recovery", 120.0, || {
        let tree = SeedTree::new(88);
        let runs = 100u64;

        let mut null_ok = 0;
        for r in 0..runs {
            let run = tree.child(r);
            let mut s = run.stream("uniform");
            let sample: Vec<f64> = (0..500).map(|_| s.next_uniform()).collect();
            let result = dip_test(&sample, 2000, run.child(1).master()).unwrap();
            if result.p_value > 0.05 {
                null_ok += 1;
            }
        }
        assert!(null_ok >= 90, "uniform p > 0.05 in only {null_ok}/100 runs");

        let mut power_ok = 0;
        for r in 0..runs {
            let run = tree.child(1000 + r);
            let mut s = run.stream("mixture");
            let sample: Vec<f64> = (0..500)
                .map(|_| {
                    let g = s.next_gaussian();
                    if s.next_uniform() < 0.5 {
                        g
                    } else {
                        8.0 + g
                    }
                })
                .collect();
            let result = dip_test(&sample, 2000, run.child(1).master()).unwrap();
            if result.p_value < 0.01 {
                power_ok += 1;
            }
        }
        assert!(power_ok >= 95, "bimodal p < 0.01 in only {power_ok}/100 runs");

        let mut break_ok = 0;
        for r in 0..runs {
            let mut s = tree.child(2000 + r).stream("series");
            let series: Vec<f64> = (0..1000)
                .map(|t| s.next_gaussian() + if t < 500 { 0.0 } else { 5.0 })
                .collect();
            let result = detect_changepoints(&series, 1, 100).unwrap();
            if result.locations.len() == 1 && result.locations[0].abs_diff(500) <= 10 {
                break_ok += 1;
            }
        }
        assert!(break_ok >= 95, "break within +/-10 in only {break_ok}/100 runs");
    });
}

// -------------------------------------------------------------- criterion 9

#[test]
fn c09_distribution_layer() {
    timed("09 distribution-layer", 60.0, || {
        let tree = SeedTree::new(909);
        let mut params = tree.stream("params");
        let mut u = || params.next_uniform();
        for draw in 0..5 {
            let specs = [
                pareto(0.5 + 3.0 * u(), 0.5 + 2.0 * u()),
                cauchy(4.0 * (u() - 0.5), 0.5 + 2.0 * u()),
                DistributionSpec::Weibull { shape: 0.5 + 2.5 * u(), scale: 0.5 + 2.0 * u() },
                DistributionSpec::Frechet {
                    location: 4.0 * (u() - 0.5),
                    shape: 0.5 + 3.0 * u(),
                    scale: 0.5 + 2.0 * u(),
                },
            ];
            for spec in specs {
                for p in [0.01, 0.5, 0.99] {
                    let x = spec.quantile(p).unwrap();
                    let survival = spec.survival(x);
                    let relative = ((survival - (1.0 - p)) / (1.0 - p)).abs();
                    assert!(
                        relative <= 1e-9,
                        "round-trip {spec:?} draw {draw} p {p}: relative error {relative}"
                    );
                }
            }
        }

        let mut fits: Vec<taildep::distributions::FitResult> = Vec::new();

        let mut s = tree.child(1).stream("pareto");
        let sample = pareto(3.0, 1.0).sample(10_000, &mut s).unwrap();
        let fit = fit_mle(&sample, Family::Pareto).unwrap();
        match fit.spec {
            DistributionSpec::Pareto { shape, .. } => {
                assert!((shape - 3.0).abs() <= 0.1, "pareto shape {shape}")
            }
            other => panic!("unexpected family {other:?}"),
        }
        fits.push(fit);

        let mut s = tree.child(2).stream("cauchy");
        let sample = cauchy(5.0, 2.0).sample(10_000, &mut s).unwrap();
        let fit = fit_mle(&sample, Family::Cauchy).unwrap();
        match fit.spec {
            DistributionSpec::Cauchy { location, scale } => {
                assert!((location - 5.0).abs() <= 0.1, "cauchy location {location}");
                assert!((scale - 2.0).abs() <= 0.1, "cauchy scale {scale}");
            }
            other => panic!("unexpected family {other:?}"),
        }
        fits.push(fit);

        let mut s = tree.child(3).stream("weibull");
        let sample = DistributionSpec::Weibull { shape: 1.5, scale: 1.0 }
            .sample(10_000, &mut s)
            .unwrap();
        let weibull = fit_mle(&sample, Family::Weibull).unwrap();
        let cauchy_fit = fit_mle(&sample, Family::Cauchy).unwrap();
        let pareto_fit = fit_mle(&sample, Family::Pareto).unwrap();
        assert!(weibull.aic < cauchy_fit.aic, "weibull not preferred over cauchy");
        assert!(weibull.aic < pareto_fit.aic, "weibull not preferred over pareto");
        fits.extend([weibull, cauchy_fit, pareto_fit]);

        for fit in &fits {
            let k = fit.spec.family().parameter_count() as f64;
            assert_eq!(fit.aic, 2.0 * k - 2.0 * fit.log_likelihood);
            assert_eq!(
                fit.bic,
                k * (fit.sample_size as f64).ln() - 2.0 * fit.log_likelihood
            );
        }
    });
}

// ------------------------------------------------------------- criterion 10

fn assert_rerun_identical(dir: &Path, label: &str, mut invoke: impl FnMut(&str)) {
    invoke("a");
    invoke("b");
    for suffix in ["report.json", "csv"] {
        let read = |tag: &str| {
            let mut found = Vec::new();
            for entry in std::fs::read_dir(dir).unwrap() {
                let path = entry.unwrap().path();
                let name = path.file_name().unwrap().to_string_lossy().to_string();
                if name.starts_with(&format!("{label}-{tag}.")) && name.ends_with(suffix) {
                    found.push((name, std::fs::read(&path).unwrap()));
                }
            }
            found.sort();
            found
        };
        let first = read("a");
        let second = read("b");
        assert!(!first.is_empty(), "{label}: no {suffix} outputs found");
        assert_eq!(first.len(), second.len());
        for ((name_a, bytes_a), (name_b, bytes_b)) in first.iter().zip(&second) {
            assert_eq!(
                bytes_a, bytes_b,
                "{label}: {name_a} and {name_b} differ between reruns"
            );
        }
    }
}

#[test]
fn c10_seeded_reruns_are_byte_identical() {
    timed("10 byte-identical-reruns", 300.0, || {
        let dir = tempfile::tempdir().unwrap();

        let mut s = SeedTree::new(5).stream("prices");
        let mut rows = String::from("ts,price\n");
        let mut level: f64 = 100.0;
        for t in 0..600 {
            level += s.next_gaussian() + if t == 300 { 40.0 } else { 0.0 };
            rows.push_str(&format!("{t},{level}\n"));
        }
        let prices = dir.path().join("prices.csv");
        std::fs::write(&prices, rows).unwrap();

        assert_rerun_identical(dir.path(), "dip", |tag| {
            run_ok(bin().args([
                "dip",
                "--input",
                prices.to_str().unwrap(),
                "--column",
                "price",
                "--seed",
                "7",
                "--out",
                dir.path().join(format!("dip-{tag}")).to_str().unwrap(),
            ]));
        });

        let grid = dir.path().join("grid.toml");
        std::fs::write(
            &grid,
            r#"
schema_version = 1

[simulate]
replications = 2
series_length = 256
base_seed = 11
indices = [1, 2]

[simulate.scheme]
family = "exponential"
values = [0.25]

[[simulate.innovations]]
plan = "iid"
spec = { family = "pareto", shape = 3.0, scale = 1.0 }

[[simulate.perturbations]]
family = "cauchy"
location = 0.0
scale = 1.0
"#,
        )
        .unwrap();
        assert_rerun_identical(dir.path(), "sim", |tag| {
            run_ok(bin().args([
                "simulate",
                "--config",
                grid.to_str().unwrap(),
                "--out",
                dir.path().join(format!("sim-{tag}")).to_str().unwrap(),
            ]));
        });

        assert_rerun_identical(dir.path(), "bounds", |tag| {
            run_ok(bin().args([
                "bounds",
                "--term",
                "1*pareto(2.414,1)",
                "--term",
                "0.3333333333333333*cauchy(0,1)",
                "--sample-size",
                "20000",
                "--seed",
                "5",
                "--out",
                dir.path().join(format!("bounds-{tag}")).to_str().unwrap(),
            ]));
        });
    });
}
