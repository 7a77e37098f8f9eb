use nalgebra::DMatrix;

use super::{OlsFit, RegressionData};
use crate::linalg::{bartlett_long_run, sandwich};
use crate::{Error, Result};

/// Automatic lag rule `floor(4 (n / 100)^(2/9))`.
pub fn default_nw_lags(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Newey–West HAC covariance `(X'X)^{-1} Ω (X'X)^{-1}` with Bartlett weights
/// on the autocovariances of `x_t e_t` up to `lags`.
pub fn newey_west_cov(fit: &OlsFit, data: &RegressionData, lags: usize) -> Result<DMatrix<f64>> {
    let n = data.n();
    if lags >= n {
        return Err(Error::LagsTooLarge { lags, periods: n });
    }
    if fit.residuals.len() != n || fit.k != data.k() {
        return Err(Error::InvalidInput("fit does not belong to this data".into()));
    }
    let moments = DMatrix::from_fn(n, data.k(), |i, j| data.x[(i, j)] * fit.residuals[i]);
    let meat = bartlett_long_run(&moments, lags);
    Ok(sandwich(&fit.xtx_inv, &meat))
}

/// White's heteroskedasticity-only covariance.
pub fn hc0_cov(fit: &OlsFit, data: &RegressionData) -> Result<DMatrix<f64>> {
    newey_west_cov(fit, data, 0)
}
