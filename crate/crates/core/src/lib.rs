//! Attention-driven volatility toolkit.
//!
//! Builds search-volume attention indices, estimates daily price variation
//! from OHLC bars with a composite range estimator, and measures the
//! one-day-ahead effect of attention on volatility with per-country HAR-X
//! regressions and fixed-effects panels.
//!
//! Module map:
//!
//! - [`calendar`]: file ingestion, time-zone shift, non-trading-day collapse, sample split
//! - [`attention`]: topic pruning and index construction
//! - [`volatility`]: Parkinson, Garman–Klass, Rogers–Satchell, overnight jump, composite
//! - [`regression`]: OLS, Newey–West, White and Ljung–Box tests, HAR-X datasets
//! - [`panel`]: within estimator, Driscoll–Kraay covariance, CIPS unit-root test
//! - [`economy`]: degree of openness and distance to Moscow
//! - [`config`], [`pipeline`], [`report`]: end-to-end runs and table emission
//! - [`simulate`]: synthetic data generators used by the fixture and tests

pub mod attention;
pub mod calendar;
pub mod config;
pub mod economy;
mod error;
pub mod exec;
pub mod linalg;
pub mod panel;
pub mod pipeline;
pub mod regression;
pub mod report;
pub mod simulate;
pub mod volatility;

pub use error::{Error, Result};
