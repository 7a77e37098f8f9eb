//! Range-based daily price variation.
//!
//! The composite estimator averages Parkinson, Garman–Klass and
//! Rogers–Satchell, adds the squared overnight return, and scales to
//! squared percent:
//!
//! `V_t = 100^2 * (J_t + (PK_t + GK_t + RS_t) / 3)`

use chrono::NaiveDate;

use crate::calendar::{DatedValue, OhlcBar, OhlcSeries};
use crate::exec::{self, ExecMode};
use crate::{Error, Result};

/// Days in the weekly component.
pub const WEEK: usize = 5;

/// Log high, low and close relative to the open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRangeTriple {
    pub h: f64,
    pub l: f64,
    pub c: f64,
}

impl LogRangeTriple {
    pub fn from_bar(bar: &OhlcBar) -> Self {
        let lo = bar.open.ln();
        Self {
            h: bar.high.ln() - lo,
            l: bar.low.ln() - lo,
            c: bar.close.ln() - lo,
        }
    }
}

pub fn parkinson(r: LogRangeTriple) -> f64 {
    (r.h - r.l).powi(2) / (4.0 * std::f64::consts::LN_2)
}

/// Garman–Klass with the coefficients 0.511 / 0.019 / 0.383 applied verbatim.
pub fn garman_klass(r: LogRangeTriple) -> f64 {
    0.511 * (r.h - r.l).powi(2) - 0.019 * (r.c * (r.h + r.l) - 2.0 * r.h * r.l) - 0.383 * r.c * r.c
}

pub fn rogers_satchell(r: LogRangeTriple) -> f64 {
    r.h * (r.h - r.c) + r.l * (r.l - r.c)
}

/// Squared close-to-open log return.
pub fn overnight_jump(open: f64, close_prev: f64) -> f64 {
    (open.ln() - close_prev.ln()).powi(2)
}

/// One day's composite value and whether it was floored at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeValue {
    pub value: f64,
    pub floored: bool,
}

/// Composite price variation in squared percent. `close_prev = None` marks
/// the first day of a sample, whose overnight term is zero.
pub fn realized_range(bar: &OhlcBar, close_prev: Option<f64>) -> Result<RangeValue> {
    bar.validate()?;
    let jump = match close_prev {
        Some(c) if c.is_finite() && c > 0.0 => overnight_jump(bar.open, c),
        Some(c) => {
            return Err(Error::InvalidBar {
                date: bar.date,
                msg: format!("previous close {c} is not a positive price"),
            })
        }
        None => 0.0,
    };
    let r = LogRangeTriple::from_bar(bar);
    let raw = 1e4 * (jump + (parkinson(r) + garman_klass(r) + rogers_satchell(r)) / 3.0);
    Ok(if raw < 0.0 {
        RangeValue { value: 0.0, floored: true }
    } else {
        RangeValue { value: raw, floored: false }
    })
}

/// `V^w_t`: mean of the five most recent daily values ending at `t`.
pub fn weekly_component(values: &[f64], t: usize) -> Option<f64> {
    if t + 1 < WEEK || t >= values.len() {
        return None;
    }
    let window = &values[t + 1 - WEEK..=t];
    // shifted mean: exact for constant windows
    let anchor = window[0];
    Some(anchor + window.iter().map(|v| v - anchor).sum::<f64>() / WEEK as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolatilitySeries {
    pub country_code: String,
    observations: Vec<DatedValue>,
    /// Starts at the fifth daily observation.
    weekly: Vec<DatedValue>,
    /// Days where the composite was negative and set to zero.
    pub floored_days: usize,
}

impl VolatilitySeries {
    pub fn from_values(country_code: impl Into<String>, observations: Vec<DatedValue>) -> Self {
        let values: Vec<f64> = observations.iter().map(|o| o.1).collect();
        let weekly = (WEEK - 1..observations.len())
            .filter_map(|t| weekly_component(&values, t).map(|w| (observations[t].0, w)))
            .collect();
        Self {
            country_code: country_code.into(),
            observations,
            weekly,
            floored_days: 0,
        }
    }

    pub fn from_ohlc(series: &OhlcSeries) -> Result<Self> {
        Self::from_ohlc_with(series, ExecMode::Parallel)
    }

    pub fn from_ohlc_with(series: &OhlcSeries, mode: ExecMode) -> Result<Self> {
        let bars = series.bars();
        let idx: Vec<usize> = (0..bars.len()).collect();
        let values = exec::map_with(mode, &idx, |&i| {
            let prev = i.checked_sub(1).map(|p| bars[p].close);
            realized_range(&bars[i], prev)
        });
        let mut obs = Vec::with_capacity(bars.len());
        let mut floored = 0;
        for (bar, v) in bars.iter().zip(values) {
            let v = v?;
            floored += usize::from(v.floored);
            obs.push((bar.date, v.value));
        }
        if floored > 0 {
            log::info!("{}: {floored} composite values floored at zero", series.country_code);
        }
        let mut out = Self::from_values(series.country_code.clone(), obs);
        out.floored_days = floored;
        Ok(out)
    }

    pub fn observations(&self) -> &[DatedValue] {
        &self.observations
    }

    pub fn weekly(&self) -> &[DatedValue] {
        &self.weekly
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.1).collect()
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Weekly value at position `t`, if defined.
    pub fn weekly_at(&self, t: usize) -> Option<f64> {
        t.checked_sub(WEEK - 1).and_then(|i| self.weekly.get(i)).map(|w| w.1)
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.observations.iter().map(|o| o.0).collect()
    }

    /// Elementwise `ln(offset + V_t)` with the weekly component rebuilt from
    /// the transformed dailies.
    pub fn log_variance(&self, offset: f64) -> Result<Self> {
        let mut obs = Vec::with_capacity(self.observations.len());
        for &(d, v) in &self.observations {
            let arg = offset + v;
            if !(arg > 0.0) {
                return Err(Error::Degenerate(format!(
                    "{}: log of non-positive price variation {arg} on {d}",
                    self.country_code
                )));
            }
            obs.push((d, arg.ln()));
        }
        let mut out = Self::from_values(self.country_code.clone(), obs);
        out.floored_days = self.floored_days;
        Ok(out)
    }
}
