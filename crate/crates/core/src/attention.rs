//! Attention indices built from per-topic search volume.
//!
//! Pipeline per group of topics: drop topics that move against the rest,
//! average the survivors date by date, then take `ln(offset + mean)`.

use std::fmt;

use chrono::NaiveDate;

use crate::calendar::{DatedValue, SviSeries};
use crate::linalg::{mean, neumaier_sum};
use crate::{Error, Result};

/// Conflict topics used for the conflict index.
pub const DEFAULT_CONFLICT_TOPICS: &[&str] = &["Russia", "Ukraine", "Vladimir Putin", "NATO", "sanctions"];

/// Financial topics used for the general index.
pub const DEFAULT_GENERAL_TOPICS: &[&str] = &[
    "asset allocation",
    "Bloomberg",
    "day trading",
    "dividend yield",
    "earnings call",
    "earnings per share",
    "exchange-traded fund",
    "financial crisis",
    "financial market",
    "futures contract",
    "Google Finance",
    "government bond",
    "hedge fund",
    "Implied volatility",
    "market capitalization",
    "market liquidity",
    "market sentiment",
    "MSCI",
    "mutual fund",
    "option contract",
    "pension fund",
    "price–earnings ratio",
    "quarterly finance report",
    "stock market index",
    "stock market",
    "technical analysis",
    "ticker symbol",
    "VIX",
    "volatility",
    "Yahoo! Finance",
    "yield curve",
];

pub const DEFAULT_ZERO_OFFSET: f64 = 1.0;
pub const DEFAULT_ASVI_WINDOW: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttentionKind {
    Conflict,
    General,
}

impl AttentionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttentionKind::Conflict => "conflict",
            AttentionKind::General => "general",
        }
    }
}

impl fmt::Display for AttentionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Topics observed on one shared date grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SviPanel {
    topics: Vec<SviSeries>,
}

impl SviPanel {
    pub fn new(mut topics: Vec<SviSeries>) -> Result<Self> {
        let Some(first) = topics.first() else {
            return Err(Error::InvalidInput("SVI panel needs at least one topic".into()));
        };
        let grid: Vec<NaiveDate> = first.dates().collect();
        for t in &topics[1..] {
            if !t.dates().eq(grid.iter().copied()) {
                return Err(Error::InvalidInput(format!(
                    "topic {} is not on the same date grid as {}",
                    t.topic_id, first.topic_id
                )));
            }
        }
        topics.sort_by(|a, b| a.topic_id.cmp(&b.topic_id));
        Ok(Self { topics })
    }

    pub fn topics(&self) -> &[SviSeries] {
        &self.topics
    }

    pub fn topic_ids(&self) -> Vec<&str> {
        self.topics.iter().map(|t| t.topic_id.as_str()).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.topics[0].dates().collect()
    }

    pub fn len(&self) -> usize {
        self.topics[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics[0].is_empty()
    }

    /// Restrict to the named topics. Unknown names are returned separately.
    pub fn select(&self, names: &[String]) -> Result<(SviPanel, Vec<String>)> {
        let missing: Vec<String> = names
            .iter()
            .filter(|n| !self.topics.iter().any(|t| &t.topic_id == *n))
            .cloned()
            .collect();
        let kept: Vec<SviSeries> = self
            .topics
            .iter()
            .filter(|t| names.contains(&t.topic_id))
            .cloned()
            .collect();
        if kept.is_empty() {
            return Err(Error::InvalidInput(format!(
                "none of the configured topics are present (have: {})",
                self.topic_ids().join(", ")
            )));
        }
        Ok((SviPanel::new(kept)?, missing))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneReason {
    ZeroVariance,
    NegativeCorrelation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneEvent {
    pub topic_id: String,
    /// Correlation with the average of the remaining topics at removal time.
    pub correlation: Option<f64>,
    pub reason: PruneReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pruned {
    pub panel: SviPanel,
    pub removed: Vec<PruneEvent>,
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let sab = neumaier_sum(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)));
    let saa = neumaier_sum(a.iter().map(|x| (x - ma).powi(2)));
    let sbb = neumaier_sum(b.iter().map(|y| (y - mb).powi(2)));
    let denom = (saa * sbb).sqrt();
    if denom > 0.0 && denom.is_finite() {
        Some((sab / denom).clamp(-1.0, 1.0))
    } else {
        None
    }
}

fn variance_is_zero(v: &[f64]) -> bool {
    v.iter().all(|x| *x == v[0])
}

/// Iteratively drop the topic most negatively correlated with the
/// equal-weight average of all other topics, until none is negative.
/// Ties go to the lowest topic id; undefined correlations never trigger removal.
pub fn prune_topics(panel: &SviPanel) -> Result<Pruned> {
    if panel.topics.len() < 2 {
        return Ok(Pruned {
            panel: panel.clone(),
            removed: Vec::new(),
        });
    }
    if panel.len() < 3 {
        return Err(Error::InsufficientRows {
            needed: 3,
            got: panel.len(),
        });
    }
    let mut removed = Vec::new();
    let mut alive: Vec<(String, Vec<f64>)> = Vec::new();
    for t in &panel.topics {
        let v = t.values();
        if variance_is_zero(&v) {
            log::warn!("topic {} has zero variance; removed", t.topic_id);
            removed.push(PruneEvent {
                topic_id: t.topic_id.clone(),
                correlation: None,
                reason: PruneReason::ZeroVariance,
            });
        } else {
            alive.push((t.topic_id.clone(), v));
        }
    }
    if alive.is_empty() {
        return Err(Error::Degenerate("every topic has zero variance".into()));
    }
    let n = panel.len();
    while alive.len() > 1 {
        let m = alive.len() as f64;
        let totals: Vec<f64> = (0..n)
            .map(|i| neumaier_sum(alive.iter().map(|(_, v)| v[i])))
            .collect();
        let mut worst: Option<(usize, f64)> = None;
        for (j, (_, v)) in alive.iter().enumerate() {
            let others: Vec<f64> = (0..n).map(|i| (totals[i] - v[i]) / (m - 1.0)).collect();
            if let Some(r) = pearson(v, &others) {
                if r < 0.0 && worst.is_none_or(|(_, w)| r < w) {
                    worst = Some((j, r));
                }
            }
        }
        let Some((j, r)) = worst else { break };
        let (topic_id, _) = alive.remove(j);
        log::info!("topic {topic_id} removed (correlation {r:.4})");
        removed.push(PruneEvent {
            topic_id,
            correlation: Some(r),
            reason: PruneReason::NegativeCorrelation,
        });
    }
    let kept: Vec<SviSeries> = panel
        .topics
        .iter()
        .filter(|t| alive.iter().any(|(id, _)| id == &t.topic_id))
        .cloned()
        .collect();
    Ok(Pruned {
        panel: SviPanel::new(kept)?,
        removed,
    })
}

/// Log-transformed attention index.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionSeries {
    pub kind: AttentionKind,
    observations: Vec<DatedValue>,
}

impl AttentionSeries {
    pub fn new(kind: AttentionKind, observations: Vec<DatedValue>) -> Result<Self> {
        if let Some(w) = observations.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidInput(format!(
                "{kind} attention dates not increasing at {}",
                w[1].0
            )));
        }
        if let Some((d, v)) = observations.iter().find(|o| !o.1.is_finite()) {
            return Err(Error::InvalidInput(format!("{kind} attention on {d} is {v}")));
        }
        Ok(Self { kind, observations })
    }

    pub fn observations(&self) -> &[DatedValue] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn value_on(&self, date: NaiveDate) -> Option<f64> {
        self.observations
            .binary_search_by_key(&date, |o| o.0)
            .ok()
            .map(|i| self.observations[i].1)
    }
}

/// `ln(zero_offset + mean_topics(SVI))` per date.
pub fn build_index(panel: &SviPanel, kind: AttentionKind, zero_offset: f64) -> Result<AttentionSeries> {
    if !(zero_offset.is_finite() && zero_offset >= 0.0) {
        return Err(Error::InvalidInput(format!("zero offset must be >= 0, got {zero_offset}")));
    }
    let dates = panel.dates();
    let k = panel.topics.len() as f64;
    let mut obs = Vec::with_capacity(dates.len());
    for (i, d) in dates.into_iter().enumerate() {
        let avg = neumaier_sum(panel.topics.iter().map(|t| t.observations()[i].1)) / k;
        let arg = zero_offset + avg;
        if arg <= 0.0 {
            return Err(Error::Degenerate(format!(
                "{kind} index on {d}: log of {arg} (use a positive zero offset)"
            )));
        }
        obs.push((d, arg.ln()));
    }
    AttentionSeries::new(kind, obs)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Abnormal search volume: `ln(offset + SVI_t) - ln(offset + median(SVI_{t-w..t-1}))`.
/// The first `window` observations have no full baseline and are dropped.
pub fn asvi(svi: &SviSeries, window: usize, offset: f64) -> Result<Vec<DatedValue>> {
    if window == 0 {
        return Err(Error::InvalidInput("asvi window must be at least 1".into()));
    }
    let obs = svi.observations();
    if obs.len() <= window {
        log::warn!(
            "topic {}: {} observations, asvi window {window}; nothing to emit",
            svi.topic_id,
            obs.len()
        );
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(obs.len() - window);
    let mut buf = Vec::with_capacity(window);
    for t in window..obs.len() {
        buf.clear();
        buf.extend(obs[t - window..t].iter().map(|o| o.1));
        let base = median(&mut buf);
        let v = (offset + obs[t].1).ln() - (offset + base).ln();
        if !v.is_finite() {
            return Err(Error::Degenerate(format!(
                "asvi undefined on {} (offset {offset})",
                obs[t].0
            )));
        }
        out.push((obs[t].0, v));
    }
    Ok(out)
}
