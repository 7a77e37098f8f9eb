//! End-to-end run: load inputs, build per-country series, fit the country
//! HAR models, the fixed-effects panels and the panel unit-root tests.
//!
//! Country failures are recorded in the skip log and never stop the batch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;

use crate::attention::{build_index, prune_topics, AttentionKind, AttentionSeries, PruneEvent, SviPanel};
use crate::calendar::{self, CountryRecord, DatedValue, TradingCalendar};
use crate::config::{AttentionScope, RunConfig};
use crate::economy::CountryMeta;
use crate::exec::{self, ExecMode};
use crate::panel::{
    build_panel, cips_from_series, driscoll_kraay_cov, fe_within, CipsOptions, CipsResult, FePanelFit, Interaction,
    PanelCovKind,
};
use crate::regression::{
    default_nw_lags, diagnose, har_design, har_rows, newey_west_cov, ols_fit, CovKind, DiagnosticsReport, HarRow,
    HarVariant, OlsFit, RegressionData,
};
use crate::volatility::VolatilitySeries;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sample {
    Pre,
    Onset,
}

impl Sample {
    pub const ALL: [Sample; 2] = [Sample::Pre, Sample::Onset];

    pub fn as_str(self) -> &'static str {
        match self {
            Sample::Pre => "pre",
            Sample::Onset => "onset",
        }
    }
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One fitted country model with Newey–West inference.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryFit {
    pub country: String,
    pub sample: Sample,
    /// `base`, or `<dummy set>:dummy_interaction` / `<dummy set>:dummy_separate`.
    pub model: String,
    pub fit: OlsFit,
    pub nw_lags: usize,
    pub diagnostics: DiagnosticsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelResult {
    pub sample: Sample,
    /// `FE-DK`, `FE-DK-DOO` or `FE-DK-Dist`.
    pub model: String,
    pub fit: FePanelFit,
    pub dk_lags: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CipsRow {
    pub sample: Sample,
    pub column: String,
    pub result: CipsResult,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SkipEntry {
    pub country: String,
    pub reason: String,
}

/// Per-country series kept for the report.
#[derive(Debug, Clone, PartialEq)]
pub struct CountrySeries {
    pub volatility: VolatilitySeries,
    pub conflict: AttentionSeries,
    pub general: AttentionSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResults {
    pub split_date: NaiveDate,
    /// Sorted by country, sample, then model in fitting order.
    pub fits: Vec<CountryFit>,
    pub panels: Vec<PanelResult>,
    pub cips: Vec<CipsRow>,
    pub skipped: Vec<SkipEntry>,
    pub pruning: Vec<(AttentionKind, PruneEvent)>,
    /// Configured topics absent from the SVI files.
    pub missing_topics: Vec<(AttentionKind, String)>,
    /// Worldwide indices on the calendar-day grid.
    pub attention: Vec<AttentionSeries>,
    pub series: BTreeMap<String, CountrySeries>,
    pub meta: BTreeMap<String, CountryMeta>,
    /// Non-fatal notes (failed dummy variants, panel or CIPS problems).
    pub warnings: Vec<String>,
}

impl RunResults {
    pub fn fit(&self, country: &str, sample: Sample, model: &str) -> Option<&CountryFit> {
        self.fits
            .iter()
            .find(|f| f.country == country && f.sample == sample && f.model == model)
    }

    pub fn base_fits(&self, sample: Sample) -> impl Iterator<Item = &CountryFit> {
        self.fits.iter().filter(move |f| f.sample == sample && f.model == "base")
    }

    pub fn panel(&self, sample: Sample, model: &str) -> Option<&PanelResult> {
        self.panels.iter().find(|p| p.sample == sample && p.model == model)
    }

    pub fn countries(&self) -> Vec<&str> {
        self.series.keys().map(String::as_str).collect()
    }
}

/// Worldwide topic panels after selection and pruning.
struct AttentionInputs {
    conflict: SviPanel,
    general: SviPanel,
    pruning: Vec<(AttentionKind, PruneEvent)>,
    missing: Vec<(AttentionKind, String)>,
}

fn load_topic_panel(path: &Path, topics: &[String], kind: AttentionKind) -> Result<(SviPanel, Vec<String>)> {
    let all = SviPanel::new(calendar::load_svi(path)?)?;
    all.select(topics).map_err(|e| Error::Config(format!("{}: {kind}: {e}", path.display())))
}

fn load_attention(cfg: &RunConfig) -> Result<AttentionInputs> {
    let mut pruning = Vec::new();
    let mut missing = Vec::new();
    let mut panels = Vec::new();
    for (kind, file, topics) in [
        (AttentionKind::Conflict, "conflict.csv", &cfg.conflict_topics),
        (AttentionKind::General, "general.csv", &cfg.general_topics),
    ] {
        let (panel, miss) = load_topic_panel(&cfg.data_dir.join(file), topics, kind)?;
        for m in miss {
            log::warn!("{kind} topic `{m}` not found in {file}");
            missing.push((kind, m));
        }
        let pruned = prune_topics(&panel)?;
        for ev in pruned.removed {
            log::info!("{kind}: removed topic `{}`", ev.topic_id);
            pruning.push((kind, ev));
        }
        panels.push(pruned.panel);
    }
    let general = panels.pop().expect("two panels");
    let conflict = panels.pop().expect("two panels");
    Ok(AttentionInputs {
        conflict,
        general,
        pruning,
        missing,
    })
}

/// Shift every topic to exchange days, collapse non-trading runs, then average and log.
fn country_index(panel: &SviPanel, cal: &TradingCalendar, kind: AttentionKind, cfg: &RunConfig) -> Result<AttentionSeries> {
    let aligned = panel
        .topics()
        .iter()
        .map(|t| {
            let shifted = calendar::shift_to_exchange_day(t, cal, cfg.tz_shift_threshold_hours);
            calendar::collapse_nontrading(&shifted, cal).series
        })
        .collect();
    build_index(&SviPanel::new(aligned)?, kind, cfg.zero_offset)
}

struct CountryOutcome {
    country: String,
    series: CountrySeries,
    meta: CountryMeta,
    rows: Vec<HarRow>,
}

fn prepare_country(record: &CountryRecord, attn: &AttentionInputs, cfg: &RunConfig) -> Result<CountryOutcome> {
    let iso = &record.meta.iso2;
    let dir = &cfg.data_dir;
    let cal = calendar::load_calendar(&dir.join(format!("{iso}_calendar.csv")), iso, record.utc_offset_hours)?;
    let loaded = calendar::load_ohlc(&dir.join(format!("{iso}.csv")), &cal)?;
    if !loaded.repaired_closes.is_empty() {
        log::warn!("{iso}: carried forward {} missing closes", loaded.repaired_closes.len());
    }
    let mut vol = VolatilitySeries::from_ohlc_with(&loaded.series, ExecMode::Sequential)?;
    if vol.floored_days > 0 {
        log::debug!("{iso}: {} days floored at zero", vol.floored_days);
    }
    if cfg.log_variance {
        vol = vol.log_variance(cfg.log_offset)?;
    }
    let conflict_panel = match cfg.attention_scope {
        AttentionScope::Worldwide => attn.conflict.clone(),
        AttentionScope::Local => {
            let ids: Vec<String> = attn.conflict.topic_ids().into_iter().map(String::from).collect();
            let (p, miss) = load_topic_panel(&dir.join(format!("conflict_{iso}.csv")), &ids, AttentionKind::Conflict)?;
            if !miss.is_empty() {
                return Err(Error::CountryRejected {
                    country: iso.clone(),
                    reason: format!("local conflict file lacks topics: {}", miss.join(", ")),
                });
            }
            p
        }
    };
    let conflict = country_index(&conflict_panel, &cal, AttentionKind::Conflict, cfg)?;
    let general = country_index(&attn.general, &cal, AttentionKind::General, cfg)?;
    let rows = har_rows(&vol, &conflict, &general)?;
    Ok(CountryOutcome {
        country: iso.clone(),
        series: CountrySeries {
            volatility: vol,
            conflict,
            general,
        },
        meta: record.meta.clone(),
        rows,
    })
}

fn split_rows(rows: &[HarRow], split: NaiveDate, sample: Sample) -> Vec<HarRow> {
    rows.iter()
        .filter(|r| (r.date >= split) == (sample == Sample::Onset))
        .copied()
        .collect()
}

fn fit_with_nw(data: &RegressionData, cfg: &RunConfig) -> Result<(OlsFit, usize, DiagnosticsReport)> {
    let fit = ols_fit(data)?;
    let lags = cfg.nw_lags.unwrap_or_else(|| default_nw_lags(data.n()));
    let cov = newey_west_cov(&fit, data, lags)?;
    let fit = fit.with_covariance(cov, CovKind::NeweyWest { lags });
    let diag = diagnose(&fit, data, cfg.lb_lags, cfg.white_cross_products)?;
    Ok((fit, lags, diag))
}

struct CountryFits {
    fits: Vec<CountryFit>,
    base: Vec<(Sample, RegressionData)>,
    warnings: Vec<String>,
}

/// Base fits must succeed in both samples; dummy variants are best effort.
fn fit_country(outcome: &CountryOutcome, cfg: &RunConfig) -> Result<CountryFits> {
    let mut fits = Vec::new();
    let mut base = Vec::new();
    let mut warnings = Vec::new();
    for sample in Sample::ALL {
        let rows = split_rows(&outcome.rows, cfg.split_date, sample);
        let data = har_design(&rows, None, HarVariant::Base)
            .map_err(|e| Error::InvalidInput(format!("{sample} sample: {e}")))?;
        let (fit, nw_lags, diagnostics) =
            fit_with_nw(&data, cfg).map_err(|e| Error::InvalidInput(format!("{sample} sample: {e}")))?;
        fits.push(CountryFit {
            country: outcome.country.clone(),
            sample,
            model: "base".into(),
            fit,
            nw_lags,
            diagnostics,
        });
        for (name, dates) in &cfg.dummy_sets {
            if !rows.iter().any(|r| dates.contains(&r.date)) {
                continue;
            }
            for variant in [HarVariant::DummyInteraction, HarVariant::DummySeparate] {
                let model = format!("{name}:{}", variant.as_str());
                match har_design(&rows, Some(dates), variant).and_then(|d| fit_with_nw(&d, cfg)) {
                    Ok((fit, nw_lags, diagnostics)) => fits.push(CountryFit {
                        country: outcome.country.clone(),
                        sample,
                        model,
                        fit,
                        nw_lags,
                        diagnostics,
                    }),
                    Err(e) => warnings.push(format!("{} {sample} {model}: {e}", outcome.country)),
                }
            }
        }
        base.push((sample, data));
    }
    Ok(CountryFits { fits, base, warnings })
}

fn panel_model_name(interaction: Option<Interaction>) -> &'static str {
    match interaction {
        None => "FE-DK",
        Some(Interaction::Doo) => "FE-DK-DOO",
        Some(Interaction::Dist) => "FE-DK-Dist",
    }
}

fn fit_panel(
    sample: Sample,
    datasets: &[(String, RegressionData)],
    meta: &BTreeMap<String, CountryMeta>,
    interaction: Option<Interaction>,
    cfg: &RunConfig,
) -> Result<PanelResult> {
    let built = build_panel(datasets, meta, interaction)?;
    let fit = fe_within(&built.panel)?;
    let lags = cfg.dk_lags.unwrap_or_else(|| default_nw_lags(fit.n_periods));
    let cov = driscoll_kraay_cov(&fit, &built.panel, lags)?;
    Ok(PanelResult {
        sample,
        model: panel_model_name(interaction).into(),
        fit: fit.with_covariance(cov, PanelCovKind::DriscollKraay { lags }),
        dk_lags: lags,
        warnings: built.warnings,
    })
}

/// Countries named in `countries.csv` plus any `<ISO2>.csv` file in the data directory.
fn discover_countries(cfg: &RunConfig) -> Result<(Vec<CountryRecord>, Vec<SkipEntry>)> {
    let records = calendar::load_countries(&cfg.data_dir.join("countries.csv"))?;
    let known: BTreeSet<String> = records.iter().map(|r| r.meta.iso2.clone()).collect();
    let mut skipped = Vec::new();
    let entries = fs::read_dir(&cfg.data_dir).map_err(|e| Error::io(&cfg.data_dir, e))?;
    let mut orphans = BTreeSet::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(&cfg.data_dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(".csv") {
            if stem.len() == 2 && stem.chars().all(|c| c.is_ascii_uppercase()) && !known.contains(stem) {
                orphans.insert(stem.to_string());
            }
        }
    }
    for o in orphans {
        skipped.push(SkipEntry {
            country: o,
            reason: "price file present but country missing from countries.csv".into(),
        });
    }
    Ok((records, skipped))
}

/// Execute one configuration. Fails only on configuration or shared-input
/// errors, or when no country survives.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunResults> {
    let missing = cfg.missing_inputs();
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|p| p.display().to_string()).collect();
        return Err(Error::Config(format!("missing inputs: {}", list.join(", "))));
    }
    let threads = exec::threads_from_env().or(cfg.threads);
    exec::with_threads(threads, || run_inner(cfg))
}

fn run_inner(cfg: &RunConfig) -> Result<RunResults> {
    let attn = load_attention(cfg)?;
    let (records, mut skipped) = discover_countries(cfg)?;

    let prepared = exec::map(&records, |r| {
        prepare_country(r, &attn, cfg).and_then(|o| fit_country(&o, cfg).map(|f| (o, f)))
    });

    let mut fits = Vec::new();
    let mut series = BTreeMap::new();
    let mut meta = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut base_by_sample: BTreeMap<Sample, Vec<(String, RegressionData)>> = BTreeMap::new();
    for (record, outcome) in records.iter().zip(prepared) {
        match outcome {
            Ok((o, f)) => {
                fits.extend(f.fits);
                warnings.extend(f.warnings);
                for (s, d) in f.base {
                    base_by_sample.entry(s).or_default().push((o.country.clone(), d));
                }
                meta.insert(o.country.clone(), o.meta);
                series.insert(o.country, o.series);
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", record.meta.iso2);
                skipped.push(SkipEntry {
                    country: record.meta.iso2.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    skipped.sort();
    if series.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no country could be processed ({} skipped)",
            skipped.len()
        )));
    }

    let mut interactions = vec![None];
    interactions.extend(cfg.interaction.interactions().into_iter().map(Some));
    let mut panels = Vec::new();
    let mut cips = Vec::new();
    let opts = CipsOptions {
        adf_lags: cfg.adf_lags,
        trend: cfg.cips_trend,
        ..CipsOptions::default()
    };
    for (sample, datasets) in &base_by_sample {
        if datasets.len() < 2 {
            warnings.push(format!("{sample}: fewer than two countries, no panel models"));
            continue;
        }
        let jobs: Vec<Option<Interaction>> = interactions.clone();
        for (inter, res) in jobs.iter().zip(exec::map(&jobs, |i| fit_panel(*sample, datasets, &meta, *i, cfg))) {
            match res {
                Ok(p) => panels.push(p),
                Err(e) => warnings.push(format!("{sample} {}: {e}", panel_model_name(*inter))),
            }
        }
        let v_d: Vec<(String, Vec<DatedValue>)> = datasets
            .iter()
            .map(|(c, d)| {
                let j = d.column_index("v_d").expect("base design has v_d");
                (c.clone(), d.dates.iter().zip(d.x.column(j).iter()).map(|(t, v)| (*t, *v)).collect())
            })
            .collect();
        match cips_from_series(&v_d, &opts) {
            Ok(result) => cips.push(CipsRow {
                sample: *sample,
                column: "v_d".into(),
                result,
            }),
            Err(e) => warnings.push(format!("{sample} CIPS: {e}")),
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let attention = vec![
        build_index(&attn.conflict, AttentionKind::Conflict, cfg.zero_offset)?,
        build_index(&attn.general, AttentionKind::General, cfg.zero_offset)?,
    ];
    Ok(RunResults {
        split_date: cfg.split_date,
        fits,
        panels,
        cips,
        skipped,
        pruning: attn.pruning,
        missing_topics: attn.missing,
        attention,
        series,
        meta,
        warnings,
    })
}

/// Problems found by a dry pass over the inputs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Validation {
    pub countries_ok: Vec<String>,
    pub problems: Vec<SkipEntry>,
}

/// Parse every input and build the per-country series without fitting.
pub fn validate(cfg: &RunConfig) -> Result<Validation> {
    let missing = cfg.missing_inputs();
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|p| p.display().to_string()).collect();
        return Err(Error::Config(format!("missing inputs: {}", list.join(", "))));
    }
    let attn = load_attention(cfg)?;
    let (records, mut problems) = discover_countries(cfg)?;
    let mut countries_ok = Vec::new();
    for r in &records {
        match prepare_country(r, &attn, cfg) {
            Ok(o) => {
                let split = cfg.split_date;
                let inside = o.rows.first().is_some_and(|f| f.date < split)
                    && o.rows.last().is_some_and(|l| l.date >= split);
                if inside {
                    countries_ok.push(o.country);
                } else {
                    problems.push(SkipEntry {
                        country: o.country,
                        reason: format!("split date {split} outside the data span"),
                    });
                }
            }
            Err(e) => problems.push(SkipEntry {
                country: r.meta.iso2.clone(),
                reason: e.to_string(),
            }),
        }
    }
    problems.sort();
    Ok(Validation { countries_ok, problems })
}
