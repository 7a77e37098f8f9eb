//! CIPS critical values for the intercept-only CADF regression with one
//! lagged difference. Rows index N, columns index T.
//!
//! Generated with `simulate_critical_values` (10,000 Gaussian random-walk
//! panels per cell, seed `2007 + 8 * row + col`). At T = 10 the CADF
//! regression keeps three residual degrees of freedom and the statistic is
//! heavy-tailed, which is why that column stands apart.

use super::cips::CriticalValues;

/// Lag order the table was simulated for.
pub const TABLE_ADF_LAGS: usize = 1;

const SIZES: [f64; 8] = [10.0, 15.0, 20.0, 30.0, 50.0, 70.0, 100.0, 200.0];

#[rustfmt::skip]
const CV_1: [[f64; 8]; 8] = [
    [-6.83, -2.78, -2.66, -2.55, -2.54, -2.54, -2.55, -2.53],
    [-5.87, -2.62, -2.50, -2.45, -2.44, -2.42, -2.44, -2.41],
    [-5.56, -2.51, -2.40, -2.38, -2.37, -2.36, -2.36, -2.35],
    [-4.76, -2.38, -2.33, -2.29, -2.30, -2.28, -2.29, -2.28],
    [-4.29, -2.32, -2.24, -2.22, -2.23, -2.24, -2.22, -2.23],
    [-3.91, -2.29, -2.22, -2.19, -2.20, -2.20, -2.19, -2.20],
    [-3.72, -2.23, -2.19, -2.18, -2.17, -2.17, -2.17, -2.17],
    [-3.38, -2.20, -2.15, -2.13, -2.13, -2.13, -2.14, -2.15],
];

#[rustfmt::skip]
const CV_5: [[f64; 8]; 8] = [
    [-4.02, -2.41, -2.36, -2.31, -2.32, -2.32, -2.32, -2.31],
    [-3.69, -2.31, -2.26, -2.23, -2.24, -2.24, -2.24, -2.24],
    [-3.54, -2.23, -2.20, -2.19, -2.21, -2.19, -2.20, -2.20],
    [-3.25, -2.16, -2.14, -2.13, -2.15, -2.15, -2.15, -2.15],
    [-3.11, -2.12, -2.09, -2.09, -2.10, -2.11, -2.11, -2.12],
    [-3.00, -2.08, -2.07, -2.07, -2.09, -2.08, -2.09, -2.10],
    [-2.89, -2.06, -2.05, -2.06, -2.07, -2.08, -2.07, -2.08],
    [-2.78, -2.03, -2.02, -2.04, -2.05, -2.05, -2.06, -2.07],
];

#[rustfmt::skip]
const CV_10: [[f64; 8]; 8] = [
    [-3.23, -2.23, -2.20, -2.18, -2.20, -2.20, -2.20, -2.20],
    [-3.03, -2.15, -2.13, -2.13, -2.14, -2.14, -2.15, -2.15],
    [-2.96, -2.09, -2.09, -2.09, -2.11, -2.10, -2.11, -2.12],
    [-2.82, -2.04, -2.04, -2.04, -2.07, -2.06, -2.07, -2.07],
    [-2.75, -2.01, -2.00, -2.01, -2.03, -2.04, -2.04, -2.05],
    [-2.69, -1.98, -1.99, -2.00, -2.02, -2.02, -2.03, -2.03],
    [-2.61, -1.97, -1.97, -1.99, -2.01, -2.01, -2.02, -2.03],
    [-2.55, -1.94, -1.95, -1.98, -2.00, -2.00, -2.01, -2.01],
];

/// Bracketing indices and weight for linear interpolation; clamps outside the grid.
fn bracket(v: f64) -> (usize, usize, f64) {
    if v <= SIZES[0] {
        return (0, 0, 0.0);
    }
    if v >= SIZES[7] {
        return (7, 7, 0.0);
    }
    let hi = SIZES.iter().position(|&s| s >= v).expect("inside grid");
    let lo = hi - 1;
    (lo, hi, (v - SIZES[lo]) / (SIZES[hi] - SIZES[lo]))
}

fn bilinear(table: &[[f64; 8]; 8], n: f64, t: f64) -> f64 {
    let (n0, n1, wn) = bracket(n);
    let (t0, t1, wt) = bracket(t);
    let row = |i: usize| table[i][t0] * (1.0 - wt) + table[i][t1] * wt;
    row(n0) * (1.0 - wn) + row(n1) * wn
}

/// 1%, 5% and 10% critical values for `n_units` units and `periods` time points.
pub fn intercept_critical_values(n_units: usize, periods: usize) -> CriticalValues {
    let (n, t) = (n_units as f64, periods as f64);
    CriticalValues {
        one: bilinear(&CV_1, n, t),
        five: bilinear(&CV_5, n, t),
        ten: bilinear(&CV_10, n, t),
    }
}
