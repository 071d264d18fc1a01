//! Heavy-tailed time series analytics.
//!
//! The crate covers the full path from simulation to diagnostics for linear
//! processes driven by regularly varying innovations:
//!
//! * [`distributions`] — Pareto, Cauchy, Weibull and Fréchet families with
//!   inverse-CDF sampling, maximum-likelihood fitting and AIC/BIC selection.
//! * [`linear_process`] — coefficient schemes, innovation plans and coupled
//!   series generation where two processes share a perturbation stream.
//! * [`tail_bounds`] — log-survival slope predictions and bounds for linear
//!   combinations of regularly varying variables, plus an empirical slope
//!   estimator.
//! * [`tail_cc`] — the lagged tail cross-correlation estimator with its
//!   theoretical decay ratios and monotonicity conditions.
//! * [`long_memory`] — rescaled-range Hurst estimation and log-periodogram
//!   regression for the fractional differencing parameter.
//! * [`dip`] / [`changepoint`] — Hartigan's dip test for unimodality and
//!   binary-segmentation change-point detection.
//! * [`rng`] — one master seed fanned out into named, independently
//!   addressable sub-streams so every simulation is reproducible.
//!
//! All fallible operations return [`Error`]; numerical conventions (quantile
//! interpolation, truncation orders, iteration caps) are documented on the
//! functions that use them.

pub mod changepoint;
pub mod dip;
pub mod distributions;
pub mod error;
pub mod linear_process;
pub mod long_memory;
pub mod rng;
pub mod stats;
pub mod tail_bounds;
pub mod tail_cc;

pub use error::{Error, Result};
