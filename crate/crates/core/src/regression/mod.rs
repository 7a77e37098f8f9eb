//! Per-country time-series estimation.
//!
//! OLS with classical, HC0 and Newey–West covariances, White and
//! Ljung–Box residual diagnostics, and the HAR-X design builders.

mod diagnostics;
mod hac;
mod har;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::linalg::{independent_columns, least_squares, neumaier_sum};
use crate::{Error, Result};

pub use diagnostics::{
    diagnose, ljung_box, white_test, white_test_residuals, DiagnosticsReport, LjungBox, WhiteTest,
    DEFAULT_LB_LAGS,
};
pub use hac::{default_nw_lags, hc0_cov, newey_west_cov};
pub use har::{build_har_dataset, har_design, har_rows, HarRow, HarVariant, MIN_HAR_ROWS};

/// Response vector, named design matrix and per-row predictor dates.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub names: Vec<String>,
    /// Predictor-side date of each row; may be empty for synthetic data.
    pub dates: Vec<NaiveDate>,
}

impl RegressionData {
    pub fn new(y: DVector<f64>, x: DMatrix<f64>, names: Vec<String>, dates: Vec<NaiveDate>) -> Result<Self> {
        let (n, k) = x.shape();
        if y.len() != n {
            return Err(Error::InvalidInput(format!("y has {} rows, X has {n}", y.len())));
        }
        if names.len() != k {
            return Err(Error::InvalidInput(format!("{} names for {k} columns", names.len())));
        }
        if !dates.is_empty() && dates.len() != n {
            return Err(Error::InvalidInput(format!("{} dates for {n} rows", dates.len())));
        }
        if n <= k {
            return Err(Error::InsufficientRows { needed: k + 1, got: n });
        }
        if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite value in regression data".into()));
        }
        Ok(Self { y, x, names, dates })
    }

    /// Convenience constructor from row-major predictors, prepending a `const` column.
    pub fn with_intercept(y: Vec<f64>, rows: &[Vec<f64>], names: &[&str]) -> Result<Self> {
        let n = rows.len();
        let k = names.len() + 1;
        let x = DMatrix::from_fn(n, k, |i, j| if j == 0 { 1.0 } else { rows[i][j - 1] });
        let mut all = vec!["const".to_string()];
        all.extend(names.iter().map(|s| s.to_string()));
        Self::new(DVector::from_vec(y), x, all, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovKind {
    Classical,
    Hc0,
    NeweyWest { lags: usize },
}

impl std::fmt::Display for CovKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CovKind::Classical => f.write_str("classical"),
            CovKind::Hc0 => f.write_str("hc0"),
            CovKind::NeweyWest { lags } => write!(f, "newey_west({lags})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    /// `SSR / (n - k)`.
    pub sigma2: f64,
    pub r2: f64,
    pub xtx_inv: DMatrix<f64>,
    pub cov: DMatrix<f64>,
    pub cov_kind: CovKind,
    pub tstats: Vec<f64>,
    pub pvalues: Vec<f64>,
    pub n: usize,
    pub k: usize,
}

/// Two-sided Student-t inference for one coefficient.
pub(crate) fn t_and_p(beta: f64, var: f64, df: usize) -> (f64, f64) {
    let se = var.max(0.0).sqrt();
    if se == 0.0 || !se.is_finite() {
        return if beta == 0.0 {
            (0.0, 1.0)
        } else {
            (beta.signum() * f64::INFINITY, 0.0)
        };
    }
    let t = beta / se;
    let dist = StudentsT::new(0.0, 1.0, df.max(1) as f64).expect("valid t distribution");
    let p = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
    (t, p)
}

/// Centered R²; zero when the response has no variation.
pub(crate) fn r_squared(y: &DVector<f64>, residuals: &DVector<f64>) -> f64 {
    let n = y.len() as f64;
    let ybar = neumaier_sum(y.iter().copied()) / n;
    let sst = neumaier_sum(y.iter().map(|v| (v - ybar).powi(2)));
    let ssr = neumaier_sum(residuals.iter().map(|e| e * e));
    if sst > 0.0 {
        1.0 - ssr / sst
    } else {
        0.0
    }
}

impl OlsFit {
    /// Replace the covariance and recompute t-statistics and p-values.
    pub fn with_covariance(mut self, cov: DMatrix<f64>, kind: CovKind) -> Self {
        let df = self.n - self.k;
        let (t, p): (Vec<f64>, Vec<f64>) = (0..self.k).map(|j| t_and_p(self.beta[j], cov[(j, j)], df)).unzip();
        self.cov = cov;
        self.cov_kind = kind;
        self.tstats = t;
        self.pvalues = p;
        self
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.index(name).map(|j| self.beta[j])
    }

    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.k).map(|j| self.cov[(j, j)].max(0.0).sqrt()).collect()
    }
}

/// Least-squares fit with classical covariance `sigma2 (X'X)^{-1}`.
pub fn ols_fit(data: &RegressionData) -> Result<OlsFit> {
    let (n, k) = data.x.shape();
    if n <= k {
        return Err(Error::InsufficientRows { needed: k + 1, got: n });
    }
    let (_, dropped) = independent_columns(&data.x);
    if !dropped.is_empty() {
        return Err(Error::Collinear(dropped.iter().map(|&j| data.names[j].clone()).collect()));
    }
    let ls = least_squares(&data.x, &data.y)?;
    let residuals = &data.y - &data.x * &ls.beta;
    let ssr = neumaier_sum(residuals.iter().map(|e| e * e));
    let sigma2 = ssr / (n - k) as f64;
    let r2 = r_squared(&data.y, &residuals);
    let cov = &ls.xtx_inv * sigma2;
    let fit = OlsFit {
        names: data.names.clone(),
        beta: ls.beta,
        residuals,
        sigma2,
        r2,
        xtx_inv: ls.xtx_inv,
        cov: DMatrix::zeros(k, k),
        cov_kind: CovKind::Classical,
        tstats: Vec::new(),
        pvalues: Vec::new(),
        n,
        k,
    };
    Ok(fit.with_covariance(cov, CovKind::Classical))
}
