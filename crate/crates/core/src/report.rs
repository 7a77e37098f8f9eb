//! Output tables and plot-ready CSV files.
//!
//! Numbers are written with six significant digits in `%g` style so that
//! repeated runs produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::OutputFormat;
use crate::economy::CountryMeta;
use crate::pipeline::{CountryFit, RunResults, Sample};
use crate::{Error, Result};

/// `%g` with six significant digits.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp) as usize;
    strip_zeros(&format!("{x:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Significance stars at the 10/5/1% levels.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "*"
    } else {
        ""
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

fn write_rows(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(header).map_err(&err)?;
    for r in rows {
        w.write_record(r).map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Regressor names in order of first appearance.
fn union_names<'a>(lists: impl Iterator<Item = &'a [String]>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for l in lists {
        for n in l {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
    }
    out
}

fn panel_label(sample: Sample) -> &'static str {
    match sample {
        Sample::Onset => "A",
        Sample::Pre => "B",
    }
}

/// Onset (Panel A) first, then pre-period (Panel B); countries in code order.
fn ordered_fits(results: &RunResults) -> Vec<&CountryFit> {
    let mut fits: Vec<&CountryFit> = results.fits.iter().collect();
    fits.sort_by_key(|f| (f.sample != Sample::Onset, f.country.clone()));
    fits
}

fn coef_cells(names: &[String], fit_names: &[String], beta: &[f64], t: &[f64], p: &[f64]) -> Vec<String> {
    let mut cells = Vec::with_capacity(3 * names.len());
    for n in names {
        match fit_names.iter().position(|m| m == n) {
            Some(j) => cells.extend([fmt_g(beta[j]), fmt_g(t[j]), fmt_g(p[j])]),
            None => cells.extend([String::new(), String::new(), String::new()]),
        }
    }
    cells
}

fn coef_header(names: &[String]) -> Vec<String> {
    names
        .iter()
        .flat_map(|n| [format!("beta_{n}"), format!("t_{n}"), format!("p_{n}")])
        .collect()
}

pub fn country_table_csv(results: &RunResults, path: &Path) -> Result<()> {
    let fits = ordered_fits(results);
    let names = union_names(fits.iter().map(|f| f.fit.names.as_slice()));
    let mut header: Vec<String> = ["panel", "sample", "country", "model"].map(String::from).to_vec();
    header.extend(coef_header(&names));
    header.extend(["r2", "white_p", "lb_p", "nw_lags", "n"].map(String::from));
    let rows: Vec<Vec<String>> = fits
        .iter()
        .map(|f| {
            let mut r = vec![
                panel_label(f.sample).to_string(),
                f.sample.to_string(),
                f.country.clone(),
                f.model.clone(),
            ];
            r.extend(coef_cells(&names, &f.fit.names, f.fit.beta.as_slice(), &f.fit.tstats, &f.fit.pvalues));
            r.extend([
                fmt_g(f.fit.r2),
                fmt_g(f.diagnostics.white_p),
                fmt_g(f.diagnostics.lb_p),
                f.nw_lags.to_string(),
                f.fit.n.to_string(),
            ]);
            r
        })
        .collect();
    write_rows(path, &header, &rows)
}

/// `0.123** (2.34)`: estimate with stars, t-statistic in parentheses.
fn md_cell(beta: f64, t: f64, p: f64) -> String {
    format!("{}{} ({})", fmt_g(beta), stars(p), fmt_g(t))
}

pub fn country_table_markdown(results: &RunResults, split_label: &str) -> String {
    let fits = ordered_fits(results);
    let names = union_names(fits.iter().map(|f| f.fit.names.as_slice()));
    let mut out = String::from("# Country HAR models\n\n");
    out.push_str("Newey-West t-statistics in parentheses. * p<0.10, ** p<0.05, *** p<0.01.\n");
    for sample in [Sample::Onset, Sample::Pre] {
        let title = match sample {
            Sample::Onset => format!("Panel A: onset of the invasion (from {split_label})"),
            Sample::Pre => format!("Panel B: pre-invasion (before {split_label})"),
        };
        out.push_str(&format!("\n## {title}\n\n| Country | Model |"));
        for n in &names {
            out.push_str(&format!(" {n} |"));
        }
        out.push_str(" R2 | White p | LB p | n |\n|---|---|");
        out.push_str(&"---|".repeat(names.len() + 4));
        out.push('\n');
        for f in fits.iter().filter(|f| f.sample == sample) {
            out.push_str(&format!("| {} | {} |", f.country, f.model));
            for n in &names {
                match f.fit.index(n) {
                    Some(j) => out.push_str(&format!(" {} |", md_cell(f.fit.beta[j], f.fit.tstats[j], f.fit.pvalues[j]))),
                    None => out.push_str("  |"),
                }
            }
            out.push_str(&format!(
                " {} | {} | {} | {} |\n",
                fmt_g(f.fit.r2),
                fmt_g(f.diagnostics.white_p),
                fmt_g(f.diagnostics.lb_p),
                f.fit.n
            ));
        }
    }
    out
}

pub fn panel_table_csv(results: &RunResults, path: &Path) -> Result<()> {
    let names = union_names(results.panels.iter().map(|p| p.fit.names.as_slice()));
    let mut header: Vec<String> = ["sample", "model"].map(String::from).to_vec();
    header.extend(coef_header(&names));
    header.extend(["r2_within", "dk_lags", "n", "n_units", "n_periods"].map(String::from));
    let rows: Vec<Vec<String>> = results
        .panels
        .iter()
        .map(|p| {
            let mut r = vec![p.sample.to_string(), p.model.clone()];
            r.extend(coef_cells(&names, &p.fit.names, p.fit.beta.as_slice(), &p.fit.tstats, &p.fit.pvalues));
            r.extend([
                fmt_g(p.fit.r2_within),
                p.dk_lags.to_string(),
                p.fit.n.to_string(),
                p.fit.n_units.to_string(),
                p.fit.n_periods.to_string(),
            ]);
            r
        })
        .collect();
    write_rows(path, &header, &rows)
}

pub fn panel_table_markdown(results: &RunResults) -> String {
    let names = union_names(results.panels.iter().map(|p| p.fit.names.as_slice()));
    let mut out = String::from("# Fixed-effects panel models\n\n");
    out.push_str("Driscoll-Kraay t-statistics in parentheses. * p<0.10, ** p<0.05, *** p<0.01.\n\n");
    out.push_str("| Sample | Model |");
    for n in &names {
        out.push_str(&format!(" {n} |"));
    }
    out.push_str(" R2 within | n | Countries |\n|---|---|");
    out.push_str(&"---|".repeat(names.len() + 3));
    out.push('\n');
    for p in &results.panels {
        out.push_str(&format!("| {} | {} |", p.sample, p.model));
        for n in &names {
            match p.fit.index(n) {
                Some(j) => out.push_str(&format!(" {} |", md_cell(p.fit.beta[j], p.fit.tstats[j], p.fit.pvalues[j]))),
                None => out.push_str("  |"),
            }
        }
        out.push_str(&format!(" {} | {} | {} |\n", fmt_g(p.fit.r2_within), p.fit.n, p.fit.n_units));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapRow {
    pub country: String,
    pub c_coef: f64,
    pub c_coef_relative: f64,
    pub c_pvalue_capped: f64,
    pub lat: f64,
    pub lon: f64,
}

/// Onset-period conflict coefficients scaled by the largest absolute one,
/// with p-values capped at 0.2.
pub fn map_rows(results: &RunResults) -> Vec<MapRow> {
    let mut rows: Vec<MapRow> = results
        .base_fits(Sample::Onset)
        .filter_map(|f| {
            let j = f.fit.index("c_att")?;
            let Some(m) = results.meta.get(&f.country) else {
                log::warn!("{}: no coordinates, left off the map", f.country);
                return None;
            };
            Some(MapRow {
                country: f.country.clone(),
                c_coef: f.fit.beta[j],
                c_coef_relative: 0.0,
                c_pvalue_capped: f.fit.pvalues[j].min(0.2),
                lat: m.capital_lat,
                lon: m.capital_lon,
            })
        })
        .collect();
    let max = rows.iter().map(|r| r.c_coef.abs()).fold(0.0, f64::max);
    if max > 0.0 {
        for r in &mut rows {
            r.c_coef_relative = r.c_coef / max;
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRow {
    pub country: String,
    pub abs_t_c: f64,
    pub doo: f64,
    pub dist_1e3km: f64,
    pub exclude_from_chart: bool,
}

/// Countries flagged for exclusion from the scatter chart; their rows are still written.
pub const CHART_EXCLUSIONS: &[&str] = &["LV"];

pub fn scatter_rows<'a>(
    fits: impl Iterator<Item = &'a CountryFit>,
    meta: &std::collections::BTreeMap<String, CountryMeta>,
) -> Vec<ScatterRow> {
    fits.filter_map(|f| {
        let j = f.fit.index("c_att")?;
        let Some(m) = meta.get(&f.country) else {
            log::warn!("{}: no openness or distance data, left out of the scatter", f.country);
            return None;
        };
        Some(ScatterRow {
            country: f.country.clone(),
            abs_t_c: f.fit.tstats[j].abs(),
            doo: m.doo,
            dist_1e3km: m.dist,
            exclude_from_chart: CHART_EXCLUSIONS.contains(&f.country.as_str()),
        })
    })
    .collect()
}

fn write_map(results: &RunResults, path: &Path) -> Result<()> {
    let header = ["country", "c_coef", "c_coef_relative", "c_pvalue_capped", "lat", "lon"].map(String::from);
    let rows: Vec<Vec<String>> = map_rows(results)
        .into_iter()
        .map(|r| {
            vec![
                r.country,
                fmt_g(r.c_coef),
                fmt_g(r.c_coef_relative),
                fmt_g(r.c_pvalue_capped),
                fmt_g(r.lat),
                fmt_g(r.lon),
            ]
        })
        .collect();
    write_rows(path, &header, &rows)
}

fn write_scatter(results: &RunResults, path: &Path) -> Result<()> {
    let header = ["country", "abs_t_c", "doo", "dist_1e3km", "exclude_from_chart"].map(String::from);
    let rows: Vec<Vec<String>> = scatter_rows(results.base_fits(Sample::Onset), &results.meta)
        .into_iter()
        .map(|r| {
            vec![
                r.country,
                fmt_g(r.abs_t_c),
                fmt_g(r.doo),
                fmt_g(r.dist_1e3km),
                r.exclude_from_chart.to_string(),
            ]
        })
        .collect();
    write_rows(path, &header, &rows)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write every table and data file for one run into `out`.
pub fn write_report(results: &RunResults, out: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::new();
    let mut push = |p: PathBuf| {
        written.push(p.clone());
        p
    };
    let split = results.split_date.to_string();
    if format.csv() {
        country_table_csv(results, &push(out.join("country_fits.csv")))?;
        panel_table_csv(results, &push(out.join("panel_fits.csv")))?;
    }
    if format.markdown() {
        write_text(&push(out.join("country_fits.md")), &country_table_markdown(results, &split))?;
        write_text(&push(out.join("panel_fits.md")), &panel_table_markdown(results))?;
    }

    let cips_rows: Vec<Vec<String>> = results
        .cips
        .iter()
        .map(|c| {
            let r = &c.result;
            vec![
                c.sample.to_string(),
                c.column.clone(),
                fmt_g(r.stat),
                fmt_g(r.critical_values.one),
                fmt_g(r.critical_values.five),
                fmt_g(r.critical_values.ten),
                r.periods.to_string(),
                r.unit_stats.len().to_string(),
                r.verdict.as_str().to_string(),
            ]
        })
        .collect();
    let header = ["sample", "column", "cips", "cv_1", "cv_5", "cv_10", "periods", "n_units", "verdict"];
    write_rows(&push(out.join("cips.csv")), &header.map(String::from), &cips_rows)?;

    let skip_rows: Vec<Vec<String>> = results
        .skipped
        .iter()
        .map(|s| vec![s.country.clone(), s.reason.clone()])
        .collect();
    write_rows(&push(out.join("skipped.csv")), &["country", "reason"].map(String::from), &skip_rows)?;

    let prune_rows: Vec<Vec<String>> = results
        .pruning
        .iter()
        .map(|(k, e)| {
            vec![
                k.as_str().to_string(),
                e.topic_id.clone(),
                e.correlation.map(fmt_g).unwrap_or_default(),
                format!("{:?}", e.reason),
            ]
        })
        .collect();
    let header = ["kind", "topic", "correlation", "reason"].map(String::from);
    write_rows(&push(out.join("pruning.csv")), &header, &prune_rows)?;

    for a in &results.attention {
        let rows: Vec<Vec<String>> = a
            .observations()
            .iter()
            .map(|(d, v)| vec![d.to_string(), fmt_g(*v)])
            .collect();
        let p = push(out.join(format!("attention_{}.csv", a.kind.as_str())));
        write_rows(&p, &["date", "value"].map(String::from), &rows)?;
    }

    let vdir = out.join("volatility");
    fs::create_dir_all(&vdir).map_err(|e| Error::io(&vdir, e))?;
    for (country, s) in &results.series {
        let v = &s.volatility;
        let rows: Vec<Vec<String>> = v
            .observations()
            .iter()
            .enumerate()
            .map(|(t, (d, x))| vec![d.to_string(), fmt_g(*x), v.weekly_at(t).map(fmt_g).unwrap_or_default()])
            .collect();
        let p = push(vdir.join(format!("volatility_{country}.csv")));
        write_rows(&p, &["date", "v", "v_weekly"].map(String::from), &rows)?;
    }

    write_map(results, &push(out.join("map_data.csv")))?;
    write_scatter(results, &push(out.join("scatter_data.csv")))?;

    let mut notes = String::new();
    for (k, t) in &results.missing_topics {
        notes.push_str(&format!("missing {} topic: {t}\n", k.as_str()));
    }
    for w in &results.warnings {
        notes.push_str(w);
        notes.push('\n');
    }
    write_text(&push(out.join("notes.txt")), &notes)?;
    Ok(written)
}
