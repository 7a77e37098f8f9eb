//! Brute-force reference implementations shared by the integration tests.
//! Plain nested vectors and loops, no shared code with the library.

#![allow(dead_code)]

use attnvol::regression::RegressionData;
use chrono::{Days, NaiveDate};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Mat = Vec<Vec<f64>>;

pub fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn day(i: usize) -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + Days::new(i as u64)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &Mat) -> Mat {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        assert!(piv.abs() > 1e-300, "singular matrix in oracle");
        for v in m[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for j in 0..2 * n {
                        m[r][j] -= f * m[c][j];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

pub fn rows_of(x: &DMatrix<f64>) -> Mat {
    (0..x.nrows()).map(|i| x.row(i).iter().copied().collect()).collect()
}

pub fn xtx(x: &Mat) -> Mat {
    let k = x[0].len();
    (0..k)
        .map(|a| (0..k).map(|b| x.iter().map(|r| r[a] * r[b]).sum()).collect())
        .collect()
}

/// `(X'X)^{-1} X'y` through the normal equations.
pub fn normal_equations(x: &Mat, y: &[f64]) -> Vec<f64> {
    let k = x[0].len();
    let xty: Vec<f64> = (0..k).map(|a| x.iter().zip(y).map(|(r, v)| r[a] * v).sum()).collect();
    let inv = inverse(&xtx(x));
    (0..k).map(|a| (0..k).map(|b| inv[a][b] * xty[b]).sum()).collect()
}

/// Newey-West covariance written as the full double sum over observation pairs.
pub fn newey_west_double_sum(x: &Mat, e: &[f64], lags: usize) -> Mat {
    let (n, k) = (x.len(), x[0].len());
    let mut s = vec![vec![0.0; k]; k];
    for i in 0..n {
        for j in 0..n {
            let d = i.abs_diff(j);
            if d > lags {
                continue;
            }
            let w = 1.0 - d as f64 / (lags as f64 + 1.0);
            for a in 0..k {
                for b in 0..k {
                    s[a][b] += w * x[i][a] * e[i] * e[j] * x[j][b];
                }
            }
        }
    }
    let inv = inverse(&xtx(x));
    matmul(&matmul(&inv, &s), &inv)
}

/// Slopes from least squares with one dummy per unit and no common intercept.
pub fn lsdv_slopes(units: &[(Vec<f64>, Mat)]) -> Vec<f64> {
    let n_units = units.len();
    let k = units[0].1[0].len();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (u, (ys, xs)) in units.iter().enumerate() {
        for (yi, xi) in ys.iter().zip(xs) {
            let mut row: Vec<f64> = (0..n_units).map(|v| f64::from(u == v)).collect();
            row.extend(xi);
            x.push(row);
            y.push(*yi);
        }
    }
    normal_equations(&x, &y)[n_units..n_units + k].to_vec()
}

pub fn random_regression(rng: &mut impl Rng, n: usize, k: usize) -> RegressionData {
    let x = DMatrix::from_fn(n, k, |_, j| if j == 0 { 1.0 } else { normal(rng) });
    let beta: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    let y = DVector::from_fn(n, |i, _| (0..k).map(|j| x[(i, j)] * beta[j]).sum::<f64>() + normal(rng));
    let names = (0..k).map(|j| if j == 0 { "const".to_string() } else { format!("x{j}") }).collect();
    RegressionData::new(y, x, names, Vec::new()).unwrap()
}

/// Regression of `y` on a constant and one regressor.
pub fn simple_regression(y: Vec<f64>, x: Vec<f64>) -> RegressionData {
    let rows: Vec<Vec<f64>> = x.into_iter().map(|v| vec![v]).collect();
    RegressionData::with_intercept(y, &rows, &["x"]).unwrap()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &Mat) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m = m.max((a[(i, j)] - b[i][j]).abs());
        }
    }
    m
}

pub fn ar1(rng: &mut impl Rng, n: usize, phi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut prev = normal(rng) / (1.0 - phi * phi).sqrt();
    for _ in 0..n {
        prev = phi * prev + normal(rng);
        out.push(prev);
    }
    out
}
