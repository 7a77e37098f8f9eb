//! Small dense linear-algebra helpers shared by the estimators.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Relative residual norm below which a column counts as a linear
/// combination of the columns before it.
pub const COLLINEARITY_TOL: f64 = 1e-9;

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    neumaier_sum(values.iter().copied()) / values.len() as f64
}

/// Greedy left-to-right rank scan. Returns `(kept, dropped)` column indices:
/// a column is dropped when it lies in the span of the kept columns before it.
pub fn independent_columns(x: &DMatrix<f64>) -> (Vec<usize>, Vec<usize>) {
    let n = x.nrows();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let norm0 = col.norm();
        if norm0 == 0.0 || !norm0.is_finite() {
            dropped.push(j);
            continue;
        }
        let mut v = col;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&v);
                v.axpy(-proj, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm <= COLLINEARITY_TOL * norm0 || n <= basis.len() {
            dropped.push(j);
        } else {
            basis.push(v / norm);
            kept.push(j);
        }
    }
    (kept, dropped)
}

/// Keep only the listed columns.
pub fn select_columns(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), cols.len(), |i, j| x[(i, cols[j])])
}

/// Full-rank least squares via Householder QR.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub beta: DVector<f64>,
    /// `(X'X)^{-1}`, formed as `R^{-1} R^{-T}`.
    pub xtx_inv: DMatrix<f64>,
}

pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<LeastSquares> {
    let (n, k) = x.shape();
    if y.len() != n {
        return Err(Error::InvalidInput(format!(
            "response has {} rows, design has {n}",
            y.len()
        )));
    }
    if n < k {
        return Err(Error::InsufficientRows { needed: k, got: n });
    }
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let qty = q.transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Degenerate("singular triangular factor".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Degenerate("singular triangular factor".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok(LeastSquares { beta, xtx_inv })
}

/// Bartlett-weighted long-run covariance of time-ordered moment rows:
/// `G0 + sum_{l=1..L} (1 - l/(L+1)) (G_l + G_l')`, `G_l = sum_t h_t h_{t-l}'`.
/// No small-sample scaling is applied.
pub fn bartlett_long_run(moments: &DMatrix<f64>, lags: usize) -> DMatrix<f64> {
    let (t_len, k) = moments.shape();
    let mut omega = moments.transpose() * moments;
    for l in 1..=lags.min(t_len.saturating_sub(1)) {
        let w = 1.0 - l as f64 / (lags as f64 + 1.0);
        let lead = moments.rows(l, t_len - l);
        let lag = moments.rows(0, t_len - l);
        let gamma = lead.transpose() * lag;
        omega += (&gamma + gamma.transpose()) * w;
    }
    debug_assert_eq!(omega.shape(), (k, k));
    omega
}

/// `B M B` with the result symmetrised to remove rounding asymmetry.
pub fn sandwich(bread: &DMatrix<f64>, meat: &DMatrix<f64>) -> DMatrix<f64> {
    let s = bread * meat * bread;
    (&s + s.transpose()) * 0.5
}
