//! Fixed-effects panel estimation with Driscoll–Kraay covariance, and the
//! CIPS panel unit-root test.

mod cips;
mod cips_table;

use std::collections::BTreeMap;
use std::ops::Range;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use crate::calendar::DatedValue;
use crate::economy::CountryMeta;
use crate::linalg::{bartlett_long_run, independent_columns, least_squares, neumaier_sum, sandwich};
use crate::regression::{t_and_p, RegressionData, MIN_HAR_ROWS};
use crate::{Error, Result};

pub use cips::{cips_from_series, cips_test, simulate_critical_values, CipsOptions, CipsResult, CipsVerdict, CriticalValues};
pub use cips_table::{intercept_critical_values, TABLE_ADF_LAGS};

/// Static covariate interacted with conflict attention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Interaction {
    Doo,
    Dist,
}

impl Interaction {
    pub fn column(self) -> &'static str {
        match self {
            Interaction::Doo => "c_doo",
            Interaction::Dist => "c_dist",
        }
    }

    fn value(self, meta: &CountryMeta) -> f64 {
        match self {
            Interaction::Doo => meta.doo,
            Interaction::Dist => meta.dist,
        }
    }
}

/// Stacked unit × date observations; rows of a unit are contiguous and date-ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelData {
    pub units: Vec<String>,
    pub unit_rows: Vec<Range<usize>>,
    pub dates: Vec<NaiveDate>,
    pub y: DVector<f64>,
    /// Regressors without an intercept.
    pub x: DMatrix<f64>,
    pub names: Vec<String>,
    pub doo: Vec<Option<f64>>,
    pub dist: Vec<Option<f64>>,
}

/// One unit's block: `(unit, dates, y, regressor rows)`.
pub type UnitBlock = (String, Vec<NaiveDate>, Vec<f64>, Vec<Vec<f64>>);

impl PanelData {
    pub fn from_units(blocks: Vec<UnitBlock>, names: Vec<String>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InsufficientRows { needed: 1, got: 0 });
        }
        let k = names.len();
        let n: usize = blocks.iter().map(|b| b.1.len()).sum();
        let mut units = Vec::new();
        let mut unit_rows = Vec::new();
        let mut dates = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        let mut xv = Vec::with_capacity(n * k);
        for (unit, ds, ys, xs) in blocks {
            if ds.len() != ys.len() || xs.len() != ys.len() || xs.iter().any(|r| r.len() != k) {
                return Err(Error::InvalidInput(format!("{unit}: ragged panel block")));
            }
            if let Some(w) = ds.windows(2).find(|w| w[1] <= w[0]) {
                return Err(Error::InvalidInput(format!("{unit}: dates not increasing at {}", w[1])));
            }
            if ys.iter().chain(xs.iter().flatten()).any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("{unit}: non-finite panel value")));
            }
            let start = dates.len();
            dates.extend(ds);
            y.extend(ys);
            xv.extend(xs.into_iter().flatten());
            unit_rows.push(start..dates.len());
            units.push(unit);
        }
        let n_units = units.len();
        Ok(Self {
            units,
            unit_rows,
            dates,
            y: DVector::from_vec(y),
            x: DMatrix::from_row_slice(n, k, &xv),
            names,
            doo: vec![None; n_units],
            dist: vec![None; n_units],
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    /// Distinct dates across all units, sorted.
    pub fn periods(&self) -> Vec<NaiveDate> {
        let mut d = self.dates.clone();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn is_balanced(&self) -> bool {
        let first = &self.dates[self.unit_rows[0].clone()];
        self.unit_rows.iter().all(|r| &self.dates[r.clone()] == first)
    }

    /// The named column (`"y"` for the response) split by unit.
    pub fn unit_series(&self, column: &str) -> Result<Vec<(String, Vec<DatedValue>)>> {
        let col: Vec<f64> = if column == "y" {
            self.y.iter().copied().collect()
        } else {
            let j = self
                .names
                .iter()
                .position(|n| n == column)
                .ok_or_else(|| Error::InvalidInput(format!("no panel column `{column}`")))?;
            self.x.column(j).iter().copied().collect()
        };
        Ok(self
            .units
            .iter()
            .zip(&self.unit_rows)
            .map(|(u, r)| (u.clone(), r.clone().map(|i| (self.dates[i], col[i])).collect()))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltPanel {
    pub panel: PanelData,
    pub warnings: Vec<String>,
}

/// Stack per-country HAR datasets (the intercept is dropped) and optionally
/// append `c_att * X_i` for a static covariate `X_i`.
pub fn build_panel(
    datasets: &[(String, RegressionData)],
    meta: &BTreeMap<String, CountryMeta>,
    interaction: Option<Interaction>,
) -> Result<BuiltPanel> {
    let mut warnings = Vec::new();
    let Some((_, first)) = datasets.first() else {
        return Err(Error::InsufficientRows { needed: 2, got: 0 });
    };
    let keep: Vec<usize> = (0..first.k()).filter(|&j| first.names[j] != "const").collect();
    let mut names: Vec<String> = keep.iter().map(|&j| first.names[j].clone()).collect();
    let c_idx = first.column_index("c_att");
    if let Some(inter) = interaction {
        if c_idx.is_none() {
            return Err(Error::InvalidInput("interaction requested without a c_att column".into()));
        }
        names.push(inter.column().to_string());
    }
    let mut blocks = Vec::new();
    let mut metas = Vec::new();
    for (unit, data) in datasets {
        if data.names != first.names {
            return Err(Error::InvalidInput(format!("{unit}: design columns differ from {}", datasets[0].0)));
        }
        if data.n() < MIN_HAR_ROWS {
            warnings.push(format!("{unit}: {} rows, below {MIN_HAR_ROWS}; dropped from panel", data.n()));
            continue;
        }
        let m = meta.get(unit);
        let multiplier = match (interaction, m) {
            (Some(inter), Some(m)) => Some(inter.value(m)),
            (Some(_), None) => {
                warnings.push(format!("{unit}: no static covariates; dropped from interaction panel"));
                continue;
            }
            (None, _) => None,
        };
        let rows: Vec<Vec<f64>> = (0..data.n())
            .map(|i| {
                let mut r: Vec<f64> = keep.iter().map(|&j| data.x[(i, j)]).collect();
                if let (Some(mult), Some(c)) = (multiplier, c_idx) {
                    r.push(data.x[(i, c)] * mult);
                }
                r
            })
            .collect();
        blocks.push((unit.clone(), data.dates.clone(), data.y.iter().copied().collect(), rows));
        metas.push(m);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    if blocks.len() < 2 {
        return Err(Error::InsufficientRows { needed: 2, got: blocks.len() });
    }
    let mut panel = PanelData::from_units(blocks, names)?;
    panel.doo = metas.iter().map(|m| m.map(|m| m.doo)).collect();
    panel.dist = metas.iter().map(|m| m.map(|m| m.dist)).collect();
    Ok(BuiltPanel { panel, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelCovKind {
    Classical,
    DriscollKraay { lags: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FePanelFit {
    pub names: Vec<String>,
    pub beta: DVector<f64>,
    /// Recovered `alpha_i = ybar_i - xbar_i' beta`, in unit order.
    pub unit_effects: Vec<(String, f64)>,
    /// Within residuals, in panel row order.
    pub residuals: DVector<f64>,
    pub r2_within: f64,
    pub xtx_inv: DMatrix<f64>,
    pub cov: DMatrix<f64>,
    pub cov_kind: PanelCovKind,
    pub tstats: Vec<f64>,
    pub pvalues: Vec<f64>,
    pub n: usize,
    pub n_units: usize,
    pub n_periods: usize,
    pub demeaned_x: DMatrix<f64>,
    pub demeaned_y: DVector<f64>,
}

impl FePanelFit {
    /// Install a covariance; t-tests use `n - N - k` degrees of freedom for
    /// the classical matrix and `T - 1` for Driscoll–Kraay.
    pub fn with_covariance(mut self, cov: DMatrix<f64>, kind: PanelCovKind) -> Self {
        let k = self.beta.len();
        let df = match kind {
            PanelCovKind::Classical => self.n.saturating_sub(self.n_units + k),
            PanelCovKind::DriscollKraay { .. } => self.n_periods.saturating_sub(1),
        };
        let (t, p) = (0..k).map(|j| t_and_p(self.beta[j], cov[(j, j)], df)).unzip();
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

    /// Demeaned data as a plain regression (no intercept).
    pub fn demeaned_data(&self) -> Result<RegressionData> {
        RegressionData::new(self.demeaned_y.clone(), self.demeaned_x.clone(), self.names.clone(), Vec::new())
    }
}

/// Within (unit-demeaned) least squares.
pub fn fe_within(panel: &PanelData) -> Result<FePanelFit> {
    let (n, k) = panel.x.shape();
    for (u, r) in panel.units.iter().zip(&panel.unit_rows) {
        if r.len() < k + 1 {
            return Err(Error::InvalidInput(format!(
                "unit {u} has {} observations, needs at least {}",
                r.len(),
                k + 1
            )));
        }
    }
    let mut xd = panel.x.clone();
    let mut yd = panel.y.clone();
    let mut ybar = Vec::with_capacity(panel.n_units());
    let mut xbar = Vec::with_capacity(panel.n_units());
    for r in &panel.unit_rows {
        let len = r.len() as f64;
        let ym = neumaier_sum(r.clone().map(|i| panel.y[i])) / len;
        for i in r.clone() {
            yd[i] -= ym;
        }
        let xm: Vec<f64> = (0..k)
            .map(|j| {
                let m = neumaier_sum(r.clone().map(|i| panel.x[(i, j)])) / len;
                for i in r.clone() {
                    xd[(i, j)] -= m;
                }
                m
            })
            .collect();
        ybar.push(ym);
        xbar.push(xm);
    }
    let (_, dropped) = independent_columns(&xd);
    if !dropped.is_empty() {
        return Err(Error::Collinear(dropped.iter().map(|&j| panel.names[j].clone()).collect()));
    }
    let ls = least_squares(&xd, &yd)?;
    let residuals = &yd - &xd * &ls.beta;
    let ssr = neumaier_sum(residuals.iter().map(|e| e * e));
    let sst = neumaier_sum(yd.iter().map(|v| v * v));
    let r2_within = if sst > 0.0 { 1.0 - ssr / sst } else { 0.0 };
    let unit_effects = panel
        .units
        .iter()
        .zip(ybar.iter().zip(&xbar))
        .map(|(u, (ym, xm))| {
            let fitted = neumaier_sum((0..k).map(|j| xm[j] * ls.beta[j]));
            (u.clone(), ym - fitted)
        })
        .collect();
    let dof = n.saturating_sub(panel.n_units() + k).max(1);
    let sigma2 = ssr / dof as f64;
    let cov = &ls.xtx_inv * sigma2;
    let fit = FePanelFit {
        names: panel.names.clone(),
        beta: ls.beta,
        unit_effects,
        residuals,
        r2_within,
        xtx_inv: ls.xtx_inv,
        cov: DMatrix::zeros(k, k),
        cov_kind: PanelCovKind::Classical,
        tstats: Vec::new(),
        pvalues: Vec::new(),
        n,
        n_units: panel.n_units(),
        n_periods: panel.periods().len(),
        demeaned_x: xd,
        demeaned_y: yd,
    };
    Ok(fit.with_covariance(cov, PanelCovKind::Classical))
}

/// Per-period moment sums `h_t = Σ_i x̃_it ê_it`, one row per distinct date.
pub fn period_moments(fit: &FePanelFit, panel: &PanelData) -> DMatrix<f64> {
    let periods = panel.periods();
    let k = fit.beta.len();
    let mut h = DMatrix::zeros(periods.len(), k);
    for i in 0..panel.n() {
        let t = periods.binary_search(&panel.dates[i]).expect("date is a period");
        for j in 0..k {
            h[(t, j)] += fit.demeaned_x[(i, j)] * fit.residuals[i];
        }
    }
    h
}

/// Driscoll–Kraay covariance: Bartlett long-run covariance of the
/// cross-sectionally summed moments, sandwiched by `(X̃'X̃)^{-1}`.
pub fn driscoll_kraay_cov(fit: &FePanelFit, panel: &PanelData, lags: usize) -> Result<DMatrix<f64>> {
    let periods = fit.n_periods;
    if lags >= periods {
        return Err(Error::LagsTooLarge { lags, periods });
    }
    if fit.residuals.len() != panel.n() {
        return Err(Error::InvalidInput("fit does not belong to this panel".into()));
    }
    let h = period_moments(fit, panel);
    Ok(sandwich(&fit.xtx_inv, &bartlett_long_run(&h, lags)))
}
