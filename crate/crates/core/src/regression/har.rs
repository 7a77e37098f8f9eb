//! HAR-X designs: next-day price variation on today's daily and weekly
//! components plus conflict and general attention, with optional
//! event-window dummies.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use super::RegressionData;
use crate::attention::AttentionSeries;
use crate::volatility::VolatilitySeries;
use crate::{Error, Result};

/// Minimum usable rows for a per-country fit.
pub const MIN_HAR_ROWS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HarVariant {
    /// `const, v_d, v_w, c_att, g_att`
    Base,
    /// adds `d_c = D_t * C_t` after `c_att`
    DummyInteraction,
    /// adds `d = D_t` after `c_att`
    DummySeparate,
}

impl HarVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            HarVariant::Base => "base",
            HarVariant::DummyInteraction => "dummy_interaction",
            HarVariant::DummySeparate => "dummy_separate",
        }
    }
}

/// One aligned observation: predictors dated `date`, response from the next trading day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarRow {
    pub date: NaiveDate,
    pub response_date: NaiveDate,
    pub y: f64,
    pub v_d: f64,
    pub v_w: f64,
    pub c_att: f64,
    pub g_att: f64,
}

/// Pair each day with its successor in the volatility series. Days before
/// the weekly component exists, the last day, and days without both
/// attention values are skipped.
pub fn har_rows(vol: &VolatilitySeries, c: &AttentionSeries, g: &AttentionSeries) -> Result<Vec<HarRow>> {
    let obs = vol.observations();
    let mut rows = Vec::new();
    for t in 0..obs.len().saturating_sub(1) {
        let Some(v_w) = vol.weekly_at(t) else { continue };
        let date = obs[t].0;
        let (Some(c_att), Some(g_att)) = (c.value_on(date), g.value_on(date)) else {
            continue;
        };
        rows.push(HarRow {
            date,
            response_date: obs[t + 1].0,
            y: obs[t + 1].1,
            v_d: obs[t].1,
            v_w,
            c_att,
            g_att,
        });
    }
    if rows.is_empty() && vol.len() > crate::volatility::WEEK {
        return Err(Error::InvalidInput(format!(
            "{}: volatility and attention dates do not overlap",
            vol.country_code
        )));
    }
    Ok(rows)
}

/// Build the design for `variant`. A dummy that is zero on every row is
/// left out, so the fit coincides with the base model.
pub fn har_design(rows: &[HarRow], dummy: Option<&BTreeSet<NaiveDate>>, variant: HarVariant) -> Result<RegressionData> {
    if rows.len() < MIN_HAR_ROWS {
        return Err(Error::InsufficientRows {
            needed: MIN_HAR_ROWS,
            got: rows.len(),
        });
    }
    let d: Vec<f64> = rows
        .iter()
        .map(|r| f64::from(dummy.is_some_and(|s| s.contains(&r.date))))
        .collect();
    let extra = match variant {
        HarVariant::Base => None,
        _ if d.iter().all(|v| *v == 0.0) => {
            log::debug!("dummy inactive on every row; {} reduces to base", variant.as_str());
            None
        }
        HarVariant::DummyInteraction => Some("d_c"),
        HarVariant::DummySeparate => Some("d"),
    };
    let mut names = vec!["const", "v_d", "v_w", "c_att"];
    names.extend(extra);
    names.push("g_att");
    let k = names.len();
    let x = DMatrix::from_fn(rows.len(), k, |i, j| {
        let r = &rows[i];
        match names[j] {
            "const" => 1.0,
            "v_d" => r.v_d,
            "v_w" => r.v_w,
            "c_att" => r.c_att,
            "d_c" => d[i] * r.c_att,
            "d" => d[i],
            "g_att" => r.g_att,
            _ => unreachable!(),
        }
    });
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.y));
    RegressionData::new(
        y,
        x,
        names.into_iter().map(String::from).collect(),
        rows.iter().map(|r| r.date).collect(),
    )
}

pub fn build_har_dataset(
    vol: &VolatilitySeries,
    c: &AttentionSeries,
    g: &AttentionSeries,
    dummy: Option<&BTreeSet<NaiveDate>>,
    variant: HarVariant,
) -> Result<RegressionData> {
    har_design(&har_rows(vol, c, g)?, dummy, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::AttentionKind;
    use crate::regression::ols_fit;
    use approx::assert_relative_eq;
    use chrono::Days;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn inputs(n: usize, start: &str) -> (VolatilitySeries, AttentionSeries, AttentionSeries) {
        let s = d(start);
        let dates: Vec<NaiveDate> = (0..n as u64).map(|i| s + Days::new(i)).collect();
        let vol = VolatilitySeries::from_values(
            "XX",
            dates.iter().enumerate().map(|(i, &d)| (d, 1.0 + ((i * 7) % 5) as f64 + 0.1 * i as f64)).collect(),
        );
        let c = AttentionSeries::new(
            AttentionKind::Conflict,
            dates.iter().enumerate().map(|(i, &d)| (d, ((i as f64) * 0.9).sin() + 2.0)).collect(),
        )
        .unwrap();
        let g = AttentionSeries::new(
            AttentionKind::General,
            dates.iter().enumerate().map(|(i, &d)| (d, ((i as f64) * 0.4).cos() + 3.0)).collect(),
        )
        .unwrap();
        (vol, c, g)
    }

    #[test]
    fn ten_days_give_five_rows() {
        let (vol, c, g) = inputs(10, "2022-01-01");
        let rows = har_rows(&vol, &c, &g).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].date, d("2022-01-05"));
        assert_eq!(rows[0].response_date, d("2022-01-06"));
        assert_eq!(rows[0].y, vol.observations()[5].1);
        assert!(matches!(
            build_har_dataset(&vol, &c, &g, None, HarVariant::Base),
            Err(Error::InsufficientRows { .. })
        ));
    }

    #[test]
    fn base_has_five_columns() {
        let (vol, c, g) = inputs(40, "2022-01-01");
        let data = build_har_dataset(&vol, &c, &g, None, HarVariant::Base).unwrap();
        assert_eq!(data.names, vec!["const", "v_d", "v_w", "c_att", "g_att"]);
    }

    #[test]
    fn invasion_week_dummy() {
        let (vol, c, g) = inputs(60, "2022-01-20");
        let week: BTreeSet<NaiveDate> = d("2022-02-21").iter_days().take(5).collect();
        let data = build_har_dataset(&vol, &c, &g, Some(&week), HarVariant::DummySeparate).unwrap();
        let j = data.column_index("d").unwrap();
        for (i, date) in data.dates.iter().enumerate() {
            assert_eq!(data.x[(i, j)] == 1.0, week.contains(date));
        }
        assert_eq!(data.x.column(j).sum(), 5.0);
        let inter = build_har_dataset(&vol, &c, &g, Some(&week), HarVariant::DummyInteraction).unwrap();
        let jc = inter.column_index("d_c").unwrap();
        let cc = inter.column_index("c_att").unwrap();
        for i in 0..inter.n() {
            assert_eq!(inter.x[(i, jc)], data.x[(i, j)] * inter.x[(i, cc)]);
        }
    }

    #[test]
    fn empty_dummy_leaves_base_fit() {
        let (vol, c, g) = inputs(40, "2022-01-01");
        let empty = BTreeSet::new();
        let base = ols_fit(&build_har_dataset(&vol, &c, &g, None, HarVariant::Base).unwrap()).unwrap();
        let inter = ols_fit(&build_har_dataset(&vol, &c, &g, Some(&empty), HarVariant::DummyInteraction).unwrap()).unwrap();
        assert_eq!(base.names, inter.names);
        for j in 0..base.k {
            assert_relative_eq!(base.beta[j], inter.beta[j], epsilon = 1e-12);
        }
    }
}
