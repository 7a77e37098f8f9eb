//! Synthetic data: GBM bars with exact intraday extremes, HAR-X processes,
//! and the multi-country fixture consumed by `attnvol simulate`.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::attention::{AttentionKind, AttentionSeries, DEFAULT_CONFLICT_TOPICS, DEFAULT_GENERAL_TOPICS};
use crate::calendar::{self, DatedValue, OhlcBar, SviSeries, TradingCalendar};
use crate::economy::{self, CountryMeta};
use crate::regression::{build_har_dataset, HarVariant, RegressionData};
use crate::volatility::VolatilitySeries;
use crate::{Error, Result};

fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// One trading session of geometric Brownian motion with zero drift in
/// price. The path is simulated on `steps` grid points and the maximum and
/// minimum between neighbouring points are drawn from the Brownian-bridge
/// extreme distribution, so high and low are those of the continuous path.
pub fn gbm_session(rng: &mut impl Rng, open: f64, variance: f64, steps: usize) -> OhlcBar {
    let steps = steps.max(1);
    let dt = variance / steps as f64;
    let drift = -0.5 * dt;
    let sd = dt.sqrt();
    let mut x = 0.0_f64;
    let mut hi = 0.0_f64;
    let mut lo = 0.0_f64;
    for _ in 0..steps {
        let next = x + drift + sd * normal(rng);
        let gap = (next - x).powi(2);
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = 1.0 - rng.random::<f64>();
        let up = 0.5 * (x + next + (gap - 2.0 * dt * u1.ln()).sqrt());
        let down = 0.5 * (x + next - (gap - 2.0 * dt * u2.ln()).sqrt());
        hi = hi.max(up);
        lo = lo.min(down);
        x = next;
    }
    OhlcBar {
        date: NaiveDate::MIN,
        open,
        high: open * hi.exp(),
        low: open * lo.exp(),
        close: open * x.exp(),
    }
}

/// Daily bars with intraday variance `variance` and an overnight gap of
/// variance `overnight_variance` before every open except the first.
pub fn gbm_bars(
    rng: &mut impl Rng,
    dates: &[NaiveDate],
    variance: &dyn Fn(usize) -> f64,
    overnight_variance: &dyn Fn(usize) -> f64,
    steps: usize,
    start_price: f64,
) -> Vec<OhlcBar> {
    let mut bars = Vec::with_capacity(dates.len());
    let mut prev_close = start_price;
    for (t, &date) in dates.iter().enumerate() {
        let open = if t == 0 {
            start_price
        } else {
            let v = overnight_variance(t);
            prev_close * (v.sqrt() * normal(rng) - 0.5 * v).exp()
        };
        let mut bar = gbm_session(rng, open, variance(t), steps);
        bar.date = date;
        prev_close = bar.close;
        bars.push(bar);
    }
    bars
}

/// Parameters of a simulated HAR-X process.
#[derive(Debug, Clone, PartialEq)]
pub struct HarProcess {
    /// `[const, v_d, v_w, c_att, g_att]`
    pub beta: [f64; 5],
    pub noise_sd: f64,
    /// AR(1) coefficient of both attention series.
    pub attention_ar: f64,
}

impl Default for HarProcess {
    fn default() -> Self {
        Self {
            beta: [1.0, 0.3, 0.4, 0.5, -0.3],
            noise_sd: 1.0,
            attention_ar: 0.8,
        }
    }
}

/// Simulate `rows` usable HAR-X observations and return the base design.
pub fn har_process(rng: &mut impl Rng, process: &HarProcess, rows: usize) -> Result<RegressionData> {
    let burn = 200;
    let total = rows + burn + 5;
    let b = process.beta;
    let mut c = vec![0.0; total];
    let mut g = vec![0.0; total];
    for t in 1..total {
        c[t] = process.attention_ar * c[t - 1] + normal(rng);
        g[t] = process.attention_ar * g[t - 1] + normal(rng);
    }
    let mean_v = b[0] / (1.0 - b[1] - b[2]);
    let mut v = vec![mean_v; total];
    for t in 4..total - 1 {
        let w = v[t - 4..=t].iter().sum::<f64>() / 5.0;
        v[t + 1] = b[0] + b[1] * v[t] + b[2] * w + b[3] * c[t] + b[4] * g[t] + process.noise_sd * normal(rng);
    }
    let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
    let dated = |xs: &[f64]| -> Vec<DatedValue> {
        xs[burn..]
            .iter()
            .enumerate()
            .map(|(i, &x)| (start + Days::new(i as u64), x))
            .collect()
    };
    let vol = VolatilitySeries::from_values("SIM", dated(&v));
    let ca = AttentionSeries::new(AttentionKind::Conflict, dated(&c))?;
    let ga = AttentionSeries::new(AttentionKind::General, dated(&g))?;
    build_har_dataset(&vol, &ca, &ga, None, HarVariant::Base)
}

// ---------------------------------------------------------------------------
// multi-country fixture

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Europe,
    Americas,
    Asia,
    Gulf,
    Africa,
}

struct CountrySeed {
    iso2: &'static str,
    name: &'static str,
    region: Region,
    utc: i32,
    lat: f64,
    lon: f64,
    /// USD billions, order of magnitude only.
    gdp: f64,
}

macro_rules! c {
    ($iso:literal, $name:literal, $reg:ident, $utc:literal, $lat:literal, $lon:literal, $gdp:literal) => {
        CountrySeed { iso2: $iso, name: $name, region: Region::$reg, utc: $utc, lat: $lat, lon: $lon, gdp: $gdp }
    };
}

#[rustfmt::skip]
const COUNTRIES: [CountrySeed; 51] = [
    c!("AE", "United Arab Emirates", Gulf, 4, 24.45, 54.38, 359.0),
    c!("AR", "Argentina", Americas, -3, -34.60, -58.38, 389.0),
    c!("AT", "Austria", Europe, 1, 48.21, 16.37, 433.0),
    c!("AU", "Australia", Asia, 10, -35.28, 149.13, 1331.0),
    c!("BE", "Belgium", Europe, 1, 50.85, 4.35, 522.0),
    c!("BR", "Brazil", Americas, -3, -15.79, -47.88, 1445.0),
    c!("CA", "Canada", Americas, -5, 45.42, -75.70, 1645.0),
    c!("CH", "Switzerland", Europe, 1, 46.95, 7.45, 752.0),
    c!("CL", "Chile", Americas, -3, -33.45, -70.67, 253.0),
    c!("CN", "China", Asia, 8, 39.90, 116.41, 14720.0),
    c!("CO", "Colombia", Americas, -5, 4.71, -74.07, 271.0),
    c!("CZ", "Czechia", Europe, 1, 50.08, 14.44, 245.0),
    c!("DE", "Germany", Europe, 1, 52.52, 13.40, 3846.0),
    c!("DK", "Denmark", Europe, 1, 55.68, 12.57, 356.0),
    c!("EG", "Egypt", Africa, 2, 30.04, 31.24, 365.0),
    c!("ES", "Spain", Europe, 1, 40.42, -3.70, 1281.0),
    c!("FI", "Finland", Europe, 2, 60.17, 24.94, 271.0),
    c!("FR", "France", Europe, 1, 48.86, 2.35, 2630.0),
    c!("GB", "United Kingdom", Europe, 0, 51.51, -0.13, 2764.0),
    c!("GR", "Greece", Europe, 2, 37.98, 23.73, 189.0),
    c!("HK", "Hong Kong", Asia, 8, 22.32, 114.17, 345.0),
    c!("HU", "Hungary", Europe, 1, 47.50, 19.04, 156.0),
    c!("ID", "Indonesia", Asia, 7, -6.21, 106.85, 1058.0),
    c!("IE", "Ireland", Europe, 0, 53.35, -6.26, 426.0),
    c!("IL", "Israel", Gulf, 2, 31.77, 35.21, 407.0),
    c!("IN", "India", Asia, 5, 28.61, 77.21, 2668.0),
    c!("IT", "Italy", Europe, 1, 41.90, 12.50, 1889.0),
    c!("JP", "Japan", Asia, 9, 35.68, 139.69, 5040.0),
    c!("KR", "South Korea", Asia, 9, 37.57, 126.98, 1638.0),
    c!("KW", "Kuwait", Gulf, 3, 29.38, 47.98, 106.0),
    c!("LV", "Latvia", Europe, 2, 56.95, 24.11, 34.0),
    c!("MA", "Morocco", Africa, 1, 34.02, -6.83, 114.0),
    c!("MX", "Mexico", Americas, -6, 19.43, -99.13, 1090.0),
    c!("MY", "Malaysia", Asia, 8, 3.14, 101.69, 337.0),
    c!("NL", "Netherlands", Europe, 1, 52.37, 4.90, 913.0),
    c!("NO", "Norway", Europe, 1, 59.91, 10.75, 362.0),
    c!("NZ", "New Zealand", Asia, 12, -41.29, 174.78, 212.0),
    c!("PE", "Peru", Americas, -5, -12.05, -77.04, 202.0),
    c!("PH", "Philippines", Asia, 8, 14.60, 120.98, 362.0),
    c!("PK", "Pakistan", Asia, 5, 33.68, 73.05, 300.0),
    c!("PL", "Poland", Europe, 1, 52.23, 21.01, 599.0),
    c!("PT", "Portugal", Europe, 0, 38.72, -9.14, 229.0),
    c!("QA", "Qatar", Gulf, 3, 25.29, 51.53, 144.0),
    c!("SA", "Saudi Arabia", Gulf, 3, 24.71, 46.68, 703.0),
    c!("SE", "Sweden", Europe, 1, 59.33, 18.07, 541.0),
    c!("SG", "Singapore", Asia, 8, 1.35, 103.82, 345.0),
    c!("TH", "Thailand", Asia, 7, 13.76, 100.50, 500.0),
    c!("TR", "Turkey", Gulf, 3, 39.93, 32.86, 720.0),
    c!("TW", "Taiwan", Asia, 8, 25.03, 121.57, 669.0),
    c!("US", "United States", Americas, -5, 38.91, -77.04, 20937.0),
    c!("ZA", "South Africa", Africa, 2, -25.75, 28.19, 302.0),
];

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}

fn holidays(region: Region, iso2: &str) -> Vec<NaiveDate> {
    let mut h = match region {
        Region::Americas => vec![ymd(2021, 7, 5), ymd(2021, 9, 6), ymd(2021, 11, 25), ymd(2021, 12, 24), ymd(2022, 1, 17), ymd(2022, 2, 21)],
        Region::Europe => vec![ymd(2021, 12, 24), ymd(2021, 12, 31), ymd(2022, 1, 6)],
        Region::Asia => vec![ymd(2021, 9, 21), ymd(2021, 10, 1), ymd(2022, 1, 31), ymd(2022, 2, 1), ymd(2022, 2, 2)],
        Region::Gulf => vec![ymd(2021, 7, 20), ymd(2021, 7, 21), ymd(2021, 7, 22)],
        Region::Africa => vec![ymd(2021, 8, 9), ymd(2021, 9, 24), ymd(2021, 12, 16), ymd(2021, 12, 27)],
    };
    if matches!(iso2, "GB" | "IE") {
        h.extend([ymd(2021, 8, 30), ymd(2021, 12, 27), ymd(2021, 12, 28), ymd(2022, 1, 3)]);
    }
    h
}

fn trading_days(seed: &CountrySeed, start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
    // Saudi, Qatari and Kuwaiti exchanges trade Sunday to Thursday.
    let sun_thu = matches!(seed.iso2, "SA" | "QA" | "KW");
    let hol = holidays(seed.region, seed.iso2);
    start
        .iter_days()
        .take_while(|d| *d <= end)
        .filter(|d| {
            let wd = d.weekday();
            let open = if sun_thu {
                !matches!(wd, Weekday::Fri | Weekday::Sat)
            } else {
                !matches!(wd, Weekday::Sat | Weekday::Sun)
            };
            open && !hol.contains(d)
        })
        .collect()
}

/// Conflict search intensity shape over the sample, before noise and normalisation.
fn conflict_shape(d: NaiveDate) -> f64 {
    let day = |y, m, dd| (d - ymd(y, m, dd)).num_days() as f64;
    let mut level = 3.0;
    // early December warning bump
    let dec = day(2021, 12, 8);
    if dec >= 0.0 {
        level += 6.0 * (-dec / 6.0).exp();
    }
    // January build-up, steepening towards the invasion
    let jan = day(2022, 1, 1);
    if jan >= 0.0 {
        level += 2.0 + 0.12 * jan + 2.0e-3 * jan * jan;
    }
    let inv = day(2022, 2, 24);
    if inv >= 0.0 {
        level += 70.0 * (-inv / 8.0).exp() + 20.0;
    }
    level
}

fn general_shape(d: NaiveDate) -> f64 {
    let weekend = matches!(d.weekday(), Weekday::Sat | Weekday::Sun);
    let inv = (d - ymd(2022, 2, 24)).num_days() as f64;
    let spike = if inv >= 0.0 { 15.0 * (-inv / 5.0).exp() } else { 0.0 };
    50.0 - if weekend { 12.0 } else { 0.0 } + spike
}

/// Normalise to a 0..100 scale with the maximum at 100, rounded like published SVI.
fn normalise(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().copied().fold(f64::MIN, f64::max);
    raw.iter().map(|v| (100.0 * v.max(0.0) / max).round()).collect()
}

fn write_svi(path: &Path, dates: &[NaiveDate], topics: &[(String, Vec<f64>)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let io = |e| Error::io(path, e);
    writeln!(w, "date,topic,value").map_err(io)?;
    for (topic, vals) in topics {
        for (d, v) in dates.iter().zip(vals) {
            writeln!(w, "{d},{topic},{v}").map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// What the fixture generator wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSummary {
    pub countries: Vec<String>,
    /// True onset-period conflict loading per country, in country order.
    pub onset_loadings: Vec<f64>,
    pub config_path: std::path::PathBuf,
}

/// Log-sd of the daily variance shock.
const SHOCK_SD: f64 = 0.15;

/// Onset conflict loading: decays with distance to Moscow and grows with openness.
fn onset_loading(meta: &CountryMeta) -> f64 {
    0.25 + 1.6 * (-meta.dist / 3.0).exp() + 4.0 * meta.doo
}

/// Write a synthetic data directory: OHLC, calendars, `countries.csv`,
/// worldwide and local SVI files, and a ready-to-run `attnvol.conf`.
///
/// The data-generating process has no conflict effect before 2022-01-01 and
/// a positive one afterwards whose size falls with distance and rises with
/// openness.
pub fn write_fixture(dir: &Path, seed: u64, n_countries: usize) -> Result<FixtureSummary> {
    if n_countries < 2 || n_countries > COUNTRIES.len() {
        return Err(Error::InvalidInput(format!(
            "fixture supports 2..={} countries, asked for {n_countries}",
            COUNTRIES.len()
        )));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = ymd(2021, 6, 22);
    let end = ymd(2022, 3, 8);
    let split = calendar::default_split_date();
    let svi_dates: Vec<NaiveDate> = ymd(2021, 6, 21).iter_days().take_while(|d| *d <= end).collect();

    // worldwide conflict topics
    let conflict_raw: Vec<(String, Vec<f64>)> = DEFAULT_CONFLICT_TOPICS
        .iter()
        .map(|t| {
            let scale = 0.6 + 0.8 * rng.random::<f64>();
            let raw: Vec<f64> = svi_dates
                .iter()
                .map(|&d| scale * conflict_shape(d) * (0.25 * normal(&mut rng)).exp())
                .collect();
            (t.to_string(), normalise(&raw))
        })
        .collect();
    // general topics: a common factor, two of them moving against it
    let common: Vec<f64> = {
        let mut ar = 0.0;
        svi_dates
            .iter()
            .map(|&d| {
                ar = 0.8 * ar + 3.0 * normal(&mut rng);
                general_shape(d) + ar
            })
            .collect()
    };
    let contrarian = ["ticker symbol", "quarterly finance report"];
    let general_raw: Vec<(String, Vec<f64>)> = DEFAULT_GENERAL_TOPICS
        .iter()
        .map(|t| {
            let flip = contrarian.contains(t);
            let raw: Vec<f64> = common
                .iter()
                .map(|&c| {
                    let base = if flip { 120.0 - c } else { c };
                    (base + 4.0 * normal(&mut rng)).max(1.0)
                })
                .collect();
            (t.to_string(), normalise(&raw))
        })
        .collect();
    write_svi(&dir.join("conflict.csv"), &svi_dates, &conflict_raw)?;
    write_svi(&dir.join("general.csv"), &svi_dates, &general_raw)?;

    let conflict_index = |topics: &[(String, Vec<f64>)]| -> Vec<DatedValue> {
        svi_dates
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let m = topics.iter().map(|t| t.1[i]).sum::<f64>() / topics.len() as f64;
                (d, (1.0 + m).ln())
            })
            .collect()
    };
    let c_world = conflict_index(&conflict_raw);
    let g_world = conflict_index(&general_raw);

    let mut countries_csv = String::from("iso2,name,utc_offset_hours,capital_lat,capital_lon,exports_to_rus,imports_from_rus,gdp\n");
    let mut summary = FixtureSummary {
        countries: Vec::new(),
        onset_loadings: Vec::new(),
        config_path: dir.join("attnvol.conf"),
    };
    for seed_c in COUNTRIES.iter().take(n_countries) {
        let dist = economy::distance_to_moscow(seed_c.lat, seed_c.lon)?;
        let mut doo = 0.002 + 0.05 * (-dist / 1.5).exp() * (0.5 + rng.random::<f64>());
        if seed_c.iso2 == "LV" {
            doo = 0.2;
        }
        let gdp = seed_c.gdp * 1e9;
        let exports = 0.4 * doo * gdp;
        let imports = 0.6 * doo * gdp;
        countries_csv.push_str(&format!(
            "{},{},{},{},{},{:.1},{:.1},{:.1}\n",
            seed_c.iso2, seed_c.name, seed_c.utc, seed_c.lat, seed_c.lon, exports, imports, gdp
        ));
        let meta = CountryMeta::new(seed_c.iso2, seed_c.lat, seed_c.lon, exports, imports, gdp)?;

        let days = trading_days(seed_c, start, end);
        let cal = TradingCalendar::new(seed_c.iso2, days.clone(), seed_c.utc)?;
        let mut cal_csv = String::from("date\n");
        for d in &days {
            cal_csv.push_str(&format!("{d}\n"));
        }
        let cal_path = dir.join(format!("{}_calendar.csv", seed_c.iso2));
        fs::write(&cal_path, cal_csv).map_err(|e| Error::io(&cal_path, e))?;

        // attention as this exchange sees it
        let align = |obs: &[DatedValue]| -> Result<Vec<DatedValue>> {
            let s = SviSeries::new("x", obs.iter().map(|&(d, v)| (d, v.min(100.0))).collect())?;
            let shifted = calendar::shift_to_exchange_day(&s, &cal, calendar::DEFAULT_TZ_SHIFT_THRESHOLD);
            Ok(calendar::collapse_nontrading(&shifted, &cal).series.observations().to_vec())
        };
        let c_loc = align(&c_world)?;
        let g_loc = align(&g_world)?;
        let lookup = |s: &[DatedValue], d: NaiveDate| s.binary_search_by_key(&d, |o| o.0).ok().map(|i| s[i].1);
        let pre_c: Vec<f64> = c_loc.iter().filter(|o| o.0 < split).map(|o| o.1).collect();
        let c_ref = pre_c.iter().sum::<f64>() / pre_c.len().max(1) as f64;
        let g_ref = g_loc.iter().map(|o| o.1).sum::<f64>() / g_loc.len().max(1) as f64;

        // Next-day variance: a lognormal shock, general attention, and
        // conflict attention after the split.
        let omega = 0.6 + 0.8 * rng.random::<f64>();
        let loading = onset_loading(&meta);
        let mut s = vec![omega; days.len()];
        for t in 0..days.len().saturating_sub(1) {
            let d = days[t];
            let c_t = lookup(&c_loc, d).unwrap_or(c_ref);
            let g_t = lookup(&g_loc, d).unwrap_or(g_ref);
            let shock = SHOCK_SD * normal(&mut rng) - 0.5 * SHOCK_SD * SHOCK_SD;
            let conflict = if d >= split { loading * (c_t - c_ref).max(0.0) } else { 0.0 };
            let next = omega * shock.exp() + 0.8 * (g_t - g_ref) + conflict;
            s[t + 1] = next.max(0.2 * omega);
        }
        let var = |t: usize| s[t] / 1e4;
        let on = |t: usize| 0.15 * s[t] / 1e4;
        let price0 = 500.0 + 1500.0 * rng.random::<f64>();
        let bars = gbm_bars(&mut rng, &days, &var, &on, 78, price0);
        let mut ohlc = String::from("date,open,high,low,close\n");
        for b in &bars {
            ohlc.push_str(&format!("{},{:.6},{:.6},{:.6},{:.6}\n", b.date, b.open, b.high, b.low, b.close));
        }
        let ohlc_path = dir.join(format!("{}.csv", seed_c.iso2));
        fs::write(&ohlc_path, ohlc).map_err(|e| Error::io(&ohlc_path, e))?;

        // local conflict attention: worldwide topics with extra local noise
        let local: Vec<(String, Vec<f64>)> = conflict_raw
            .iter()
            .map(|(t, vals)| {
                let raw: Vec<f64> = vals.iter().map(|v| (v + 1.0) * (0.3 * normal(&mut rng)).exp()).collect();
                (t.clone(), normalise(&raw))
            })
            .collect();
        write_svi(&dir.join(format!("conflict_{}.csv", seed_c.iso2)), &svi_dates, &local)?;

        summary.countries.push(seed_c.iso2.to_string());
        summary.onset_loadings.push(loading);
    }
    let cpath = dir.join("countries.csv");
    fs::write(&cpath, countries_csv).map_err(|e| Error::io(&cpath, e))?;

    let conf = format!(
        "# synthetic fixture, seed {seed}\n\
         data_dir = .\n\
         split_date = {split}\n\
         robustness_splits = 2021-12-01, 2021-12-15, 2022-01-15\n\
         interaction = both\n\
         attention_scope = worldwide\n\
         log_variance = false\n\
         zero_offset = 1\n\
         dummy_set.invasion_week = 2022-02-21..2022-02-25\n\
         dummy_set.feb21 = 2022-02-21\n\
         dummy_set.feb24 = 2022-02-24\n"
    );
    fs::write(&summary.config_path, conf).map_err(|e| Error::io(&summary.config_path, e))?;
    Ok(summary)
}

/// Trading days of a fixture country, for tests that need the calendar.
pub fn fixture_calendar(iso2: &str) -> Option<BTreeSet<NaiveDate>> {
    COUNTRIES
        .iter()
        .find(|c| c.iso2 == iso2)
        .map(|c| trading_days(c, ymd(2021, 6, 22), ymd(2022, 3, 8)).into_iter().collect())
}
