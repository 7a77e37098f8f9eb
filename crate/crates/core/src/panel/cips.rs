//! Cross-sectionally augmented Dickey–Fuller regressions and their average (CIPS).
//!
//! Per unit `i`:
//! `Δy_it = a_i + b_i y_i,t-1 + c_i ȳ_t-1 + d_i Δȳ_t + Σ_j (e_ij Δy_i,t-j + f_ij Δȳ_t-j) [+ g_i t] + u_it`
//! with `ȳ_t` the cross-section mean over units observed at `t`. CIPS is the
//! mean of the t-ratios on `b_i`; large negative values reject a unit root.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::cips_table::{intercept_critical_values, TABLE_ADF_LAGS};
use super::PanelData;
use crate::calendar::DatedValue;
use crate::exec::{self, ExecMode};
use crate::linalg::{independent_columns, least_squares, neumaier_sum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CipsOptions {
    pub adf_lags: usize,
    /// Add a linear trend to every CADF regression. Critical values are
    /// tabulated only for the intercept case with one lag; anything else is simulated.
    pub trend: bool,
    /// Minimum observations for a unit to take part.
    pub min_obs: usize,
    /// Replications for simulated critical values.
    pub sim_reps: usize,
    pub sim_seed: u64,
}

impl Default for CipsOptions {
    fn default() -> Self {
        Self {
            adf_lags: 1,
            trend: false,
            min_obs: 20,
            sim_reps: 500,
            sim_seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CipsVerdict {
    RejectUnitRoot,
    FailToReject,
}

impl CipsVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            CipsVerdict::RejectUnitRoot => "reject unit root",
            CipsVerdict::FailToReject => "fail to reject unit root",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CipsResult {
    pub stat: f64,
    pub unit_stats: Vec<(String, f64)>,
    pub excluded: Vec<(String, String)>,
    /// Average time dimension used for the critical-value lookup.
    pub periods: usize,
    pub critical_values: CriticalValues,
    /// Verdict at the 5% level.
    pub verdict: CipsVerdict,
}

/// CIPS on one panel column (`"y"` for the response).
pub fn cips_test(panel: &PanelData, column: &str, opts: &CipsOptions) -> Result<CipsResult> {
    cips_from_series(&panel.unit_series(column)?, opts)
}

/// CIPS over per-unit date-sorted series.
pub fn cips_from_series(series: &[(String, Vec<DatedValue>)], opts: &CipsOptions) -> Result<CipsResult> {
    let (stat, unit_stats, excluded, periods) = cips_statistic(series, opts, ExecMode::Parallel)?;
    let n = unit_stats.len();
    let critical_values = if opts.trend || opts.adf_lags != TABLE_ADF_LAGS {
        simulate_critical_values(n, periods, opts, opts.sim_reps, opts.sim_seed)?
    } else {
        intercept_critical_values(n, periods)
    };
    let verdict = if stat < critical_values.five {
        CipsVerdict::RejectUnitRoot
    } else {
        CipsVerdict::FailToReject
    };
    Ok(CipsResult {
        stat,
        unit_stats,
        excluded,
        periods,
        critical_values,
        verdict,
    })
}

type CipsStat = (f64, Vec<(String, f64)>, Vec<(String, String)>, usize);

fn cips_statistic(series: &[(String, Vec<DatedValue>)], opts: &CipsOptions, mode: ExecMode) -> Result<CipsStat> {
    if series.len() < 2 {
        return Err(Error::InsufficientRows { needed: 2, got: series.len() });
    }
    let min_obs = opts.min_obs.max(opts.adf_lags + 5);
    let mut excluded = Vec::new();
    let mut active: Vec<&(String, Vec<DatedValue>)> = Vec::new();
    for s in series {
        if s.1.len() < min_obs {
            excluded.push((s.0.clone(), format!("{} observations, need {min_obs}", s.1.len())));
        } else {
            active.push(s);
        }
    }
    if active.len() < 2 {
        return Err(Error::Degenerate(format!(
            "CIPS needs at least two units with {min_obs}+ observations, have {}",
            active.len()
        )));
    }
    // cross-section means by date
    let mut sums: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
    for (_, obs) in &active {
        for &(d, v) in obs {
            sums.entry(d).or_default().push(v);
        }
    }
    let xbar: BTreeMap<NaiveDate, f64> = sums
        .into_iter()
        .map(|(d, v)| (d, neumaier_sum(v.iter().copied()) / v.len() as f64))
        .collect();

    let results = exec::map_with(mode, &active, |(_, obs)| cadf_t(obs, &xbar, opts));
    let mut unit_stats = Vec::new();
    for ((unit, obs), r) in active.iter().zip(results) {
        match r {
            Ok(t) => unit_stats.push((unit.clone(), t)),
            Err(e) => excluded.push((unit.clone(), format!("{e} ({} obs)", obs.len()))),
        }
    }
    if unit_stats.len() < 2 {
        return Err(Error::Degenerate("fewer than two usable CADF regressions".into()));
    }
    let stat = neumaier_sum(unit_stats.iter().map(|u| u.1)) / unit_stats.len() as f64;
    let used: Vec<usize> = unit_stats
        .iter()
        .map(|(u, _)| active.iter().find(|s| &s.0 == u).map_or(0, |s| s.1.len()))
        .collect();
    let periods = (used.iter().sum::<usize>() as f64 / used.len() as f64).round() as usize;
    Ok((stat, unit_stats, excluded, periods))
}

/// t-ratio on the lagged level in one unit's CADF regression.
fn cadf_t(obs: &[DatedValue], xbar: &BTreeMap<NaiveDate, f64>, opts: &CipsOptions) -> Result<f64> {
    let p = opts.adf_lags;
    let y: Vec<f64> = obs.iter().map(|o| o.1).collect();
    let m: Vec<f64> = obs.iter().map(|o| xbar[&o.0]).collect();
    let dy = |s: usize| y[s] - y[s - 1];
    let dm = |s: usize| m[s] - m[s - 1];
    let start = p + 1;
    let rows = y.len() - start;
    let k = 4 + 2 * p + usize::from(opts.trend);
    if rows <= k + 1 {
        return Err(Error::InsufficientRows { needed: k + 2, got: rows });
    }
    let mut x = DMatrix::zeros(rows, k);
    let mut z = DVector::zeros(rows);
    for (r, s) in (start..y.len()).enumerate() {
        z[r] = dy(s);
        x[(r, 0)] = 1.0;
        x[(r, 1)] = y[s - 1];
        x[(r, 2)] = m[s - 1];
        x[(r, 3)] = dm(s);
        for j in 1..=p {
            x[(r, 2 + 2 * j)] = dy(s - j);
            x[(r, 3 + 2 * j)] = dm(s - j);
        }
        if opts.trend {
            x[(r, k - 1)] = s as f64;
        }
    }
    let (_, dropped) = independent_columns(&x);
    if !dropped.is_empty() {
        return Err(Error::Degenerate("collinear CADF regression".into()));
    }
    let ls = least_squares(&x, &z)?;
    let resid = &z - &x * &ls.beta;
    let sigma2 = neumaier_sum(resid.iter().map(|e| e * e)) / (rows - k) as f64;
    let se = (sigma2 * ls.xtx_inv[(1, 1)]).sqrt();
    if !(se > 0.0) {
        return Err(Error::Degenerate("zero CADF standard error".into()));
    }
    Ok(ls.beta[1] / se)
}

/// Empirical 1/5/10% quantiles of CIPS under independent Gaussian random walks.
pub fn simulate_critical_values(
    n_units: usize,
    periods: usize,
    opts: &CipsOptions,
    reps: usize,
    seed: u64,
) -> Result<CriticalValues> {
    if reps < 20 {
        return Err(Error::InvalidInput("need at least 20 replications".into()));
    }
    let inner = CipsOptions {
        min_obs: 0,
        ..*opts
    };
    let stats = exec::map_range(ExecMode::Parallel, reps, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9).wrapping_add(r as u64));
        let series = random_walk_panel(&mut rng, n_units, periods);
        cips_statistic(&series, &inner, ExecMode::Sequential).map(|s| s.0)
    });
    let mut stats: Vec<f64> = stats.into_iter().collect::<Result<_>>()?;
    stats.sort_by(f64::total_cmp);
    let q = |a: f64| stats[((a * reps as f64).ceil() as usize).saturating_sub(1).min(reps - 1)];
    Ok(CriticalValues {
        one: q(0.01),
        five: q(0.05),
        ten: q(0.10),
    })
}

pub(crate) fn random_walk_panel(rng: &mut ChaCha8Rng, n_units: usize, periods: usize) -> Vec<(String, Vec<DatedValue>)> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
    (0..n_units)
        .map(|i| {
            let mut level = 0.0;
            let obs = (0..periods)
                .map(|t| {
                    let e: f64 = StandardNormal.sample(rng);
                    level += e;
                    (start + chrono::Days::new(t as u64), level)
                })
                .collect();
            (format!("u{i:03}"), obs)
        })
        .collect()
}
