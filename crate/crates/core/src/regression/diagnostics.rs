use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{r_squared, OlsFit, RegressionData};
use crate::linalg::{independent_columns, least_squares, mean, neumaier_sum, select_columns};
use crate::{Error, Result};

pub const DEFAULT_LB_LAGS: usize = 5;

fn chi2_sf(stat: f64, df: usize) -> f64 {
    if df == 0 || stat <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    dist.sf(stat).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhiteTest {
    pub stat: f64,
    pub p: f64,
    /// Auxiliary slopes actually used.
    pub df: usize,
    /// Auxiliary terms dropped as duplicates of earlier ones.
    pub dropped: Vec<String>,
}

/// White test on the residuals of `fit`.
pub fn white_test(fit: &OlsFit, data: &RegressionData, cross_products: bool) -> Result<WhiteTest> {
    white_test_residuals(&fit.residuals, data, cross_products)
}

/// `n R²` from regressing squared residuals on a constant, the non-constant
/// regressors, their squares and (optionally) their pairwise products.
pub fn white_test_residuals(
    residuals: &DVector<f64>,
    data: &RegressionData,
    cross_products: bool,
) -> Result<WhiteTest> {
    let n = data.n();
    if residuals.len() != n {
        return Err(Error::InvalidInput("residual length does not match data".into()));
    }
    let vars: Vec<usize> = (0..data.k())
        .filter(|&j| {
            let c = data.x.column(j);
            c.iter().any(|v| *v != c[0])
        })
        .collect();
    let mut cols: Vec<DVector<f64>> = vec![DVector::from_element(n, 1.0)];
    let mut names = vec!["const".to_string()];
    for &j in &vars {
        cols.push(data.x.column(j).into_owned());
        names.push(data.names[j].clone());
    }
    for (a, &i) in vars.iter().enumerate() {
        for &j in &vars[a..] {
            if i != j && !cross_products {
                continue;
            }
            cols.push(data.x.column(i).component_mul(&data.x.column(j)));
            names.push(format!("{}*{}", data.names[i], data.names[j]));
        }
    }
    if cols.len() >= n {
        return Err(Error::InsufficientRows {
            needed: cols.len() + 1,
            got: n,
        });
    }
    let aux = DMatrix::from_columns(&cols);
    let (kept, dropped) = independent_columns(&aux);
    let dropped: Vec<String> = dropped.into_iter().map(|j| names[j].clone()).collect();
    if !dropped.is_empty() {
        log::debug!("white test: dropped duplicated terms {}", dropped.join(", "));
    }
    let aux = select_columns(&aux, &kept);
    let e2 = residuals.map(|e| e * e);
    let ls = least_squares(&aux, &e2)?;
    let resid = &e2 - &aux * &ls.beta;
    let r2 = r_squared(&e2, &resid).max(0.0);
    let stat = n as f64 * r2;
    let df = kept.len() - 1;
    Ok(WhiteTest {
        stat,
        p: chi2_sf(stat, df),
        df,
        dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LjungBox {
    pub stat: f64,
    pub p: f64,
    pub lags: usize,
}

/// `Q = n (n + 2) Σ_{k=1..L} ρ_k² / (n - k)`, referred to χ²(L).
pub fn ljung_box(residuals: &[f64], lags: usize) -> Result<LjungBox> {
    let n = residuals.len();
    if lags == 0 {
        return Err(Error::InvalidInput("Ljung–Box needs at least one lag".into()));
    }
    if n <= lags {
        return Err(Error::InsufficientRows { needed: lags + 1, got: n });
    }
    let m = mean(residuals);
    let dev: Vec<f64> = residuals.iter().map(|e| e - m).collect();
    let denom = neumaier_sum(dev.iter().map(|d| d * d));
    if !(denom > 0.0) {
        return Err(Error::Degenerate("constant residuals: autocorrelations undefined".into()));
    }
    let nf = n as f64;
    let q = nf
        * (nf + 2.0)
        * (1..=lags)
            .map(|k| {
                let rho = neumaier_sum((k..n).map(|t| dev[t] * dev[t - k])) / denom;
                rho * rho / (nf - k as f64)
            })
            .sum::<f64>();
    Ok(LjungBox {
        stat: q,
        p: chi2_sf(q, lags),
        lags,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub white_stat: f64,
    pub white_p: f64,
    pub lb_stat: f64,
    pub lb_p: f64,
    pub lb_lags: usize,
    pub white_dropped: Vec<String>,
}

pub fn diagnose(fit: &OlsFit, data: &RegressionData, lb_lags: usize, cross_products: bool) -> Result<DiagnosticsReport> {
    let white = white_test(fit, data, cross_products)?;
    let lb = ljung_box(fit.residuals.as_slice(), lb_lags)?;
    Ok(DiagnosticsReport {
        white_stat: white.stat,
        white_p: white.p,
        lb_stat: lb.stat,
        lb_p: lb.p,
        lb_lags: lb.lags,
        white_dropped: white.dropped,
    })
}
