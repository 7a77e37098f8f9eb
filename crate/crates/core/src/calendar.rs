//! Input files, trading calendars and date alignment.
//!
//! File layouts (all comma separated, ISO-8601 dates, `.` decimal point):
//!
//! - `<ISO2>.csv`: `date,open,high,low,close`
//! - `<ISO2>_calendar.csv`: `date` (one trading day per row)
//! - `conflict.csv`, `general.csv`: `date,topic,value` in long format
//! - `countries.csv`: `iso2,name,utc_offset_hours,capital_lat,capital_lon,exports_to_rus,imports_from_rus,gdp`

use std::collections::BTreeMap;
use std::fs::File;
use std::ops::Range;
use std::path::Path;

use chrono::{Days, NaiveDate};

use crate::economy::CountryMeta;
use crate::{Error, Result};

pub type DatedValue = (NaiveDate, f64);

/// Default split between the pre-invasion and onset-of-invasion samples.
pub fn default_split_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2022, 1, 1).expect("valid date")
}

/// Default `tz_shift_threshold_hours`.
pub const DEFAULT_TZ_SHIFT_THRESHOLD: i32 = 3;

pub trait Dated {
    fn date(&self) -> NaiveDate;
}

impl Dated for DatedValue {
    fn date(&self) -> NaiveDate {
        self.0
    }
}

impl Dated for NaiveDate {
    fn date(&self) -> NaiveDate {
        *self
    }
}

fn strictly_increasing<T: Dated>(items: &[T]) -> Option<NaiveDate> {
    items
        .windows(2)
        .find(|w| w[1].date() <= w[0].date())
        .map(|w| w[1].date())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradingCalendar {
    pub country_code: String,
    trading_days: Vec<NaiveDate>,
    pub utc_offset_hours: i32,
}

impl TradingCalendar {
    pub fn new(
        country_code: impl Into<String>,
        trading_days: Vec<NaiveDate>,
        utc_offset_hours: i32,
    ) -> Result<Self> {
        let country_code = country_code.into();
        if !(-12..=14).contains(&utc_offset_hours) {
            return Err(Error::InvalidInput(format!(
                "{country_code}: utc offset {utc_offset_hours} outside -12..=14"
            )));
        }
        if let Some(d) = strictly_increasing(&trading_days) {
            return Err(Error::InvalidInput(format!(
                "{country_code}: trading days not strictly increasing at {d}"
            )));
        }
        Ok(Self {
            country_code,
            trading_days,
            utc_offset_hours,
        })
    }

    pub fn trading_days(&self) -> &[NaiveDate] {
        &self.trading_days
    }

    pub fn is_trading_day(&self, date: NaiveDate) -> bool {
        self.trading_days.binary_search(&date).is_ok()
    }

    pub fn first(&self) -> Option<NaiveDate> {
        self.trading_days.first().copied()
    }

    pub fn last(&self) -> Option<NaiveDate> {
        self.trading_days.last().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhlcBar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
}

impl OhlcBar {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidBar { date: self.date, msg });
        for (name, v) in [
            ("open", self.open),
            ("high", self.high),
            ("low", self.low),
            ("close", self.close),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} = {v} is not a positive price"));
            }
        }
        if self.high < self.low {
            return bad(format!("high {} < low {}", self.high, self.low));
        }
        if self.low > self.open.min(self.close) {
            return bad(format!("low {} above open/close", self.low));
        }
        if self.high < self.open.max(self.close) {
            return bad(format!("high {} below open/close", self.high));
        }
        Ok(())
    }
}

impl Dated for OhlcBar {
    fn date(&self) -> NaiveDate {
        self.date
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OhlcSeries {
    pub country_code: String,
    bars: Vec<OhlcBar>,
}

impl OhlcSeries {
    pub fn new(country_code: impl Into<String>, bars: Vec<OhlcBar>, calendar: &TradingCalendar) -> Result<Self> {
        for bar in &bars {
            bar.validate()?;
            if !calendar.is_trading_day(bar.date) {
                return Err(Error::InvalidBar {
                    date: bar.date,
                    msg: format!("not a trading day for {}", calendar.country_code),
                });
            }
        }
        if let Some(d) = strictly_increasing(&bars) {
            return Err(Error::InvalidBar {
                date: d,
                msg: "dates not strictly increasing".into(),
            });
        }
        Ok(Self {
            country_code: country_code.into(),
            bars,
        })
    }

    pub fn bars(&self) -> &[OhlcBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }
}

/// One topic's search-volume index (0..=100).
#[derive(Debug, Clone, PartialEq)]
pub struct SviSeries {
    pub topic_id: String,
    observations: Vec<DatedValue>,
}

impl SviSeries {
    pub fn new(topic_id: impl Into<String>, observations: Vec<DatedValue>) -> Result<Self> {
        let topic_id = topic_id.into();
        if let Some(d) = strictly_increasing(&observations) {
            return Err(Error::InvalidInput(format!(
                "topic {topic_id}: dates not strictly increasing at {d}"
            )));
        }
        if let Some((d, v)) = observations
            .iter()
            .find(|(_, v)| !(v.is_finite() && (0.0..=100.0).contains(v)))
        {
            return Err(Error::InvalidInput(format!(
                "topic {topic_id}: value {v} on {d} outside [0, 100]"
            )));
        }
        Ok(Self {
            topic_id,
            observations,
        })
    }

    pub fn observations(&self) -> &[DatedValue] {
        &self.observations
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.observations.iter().map(|o| o.0)
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

    pub fn is_daily_contiguous(&self) -> bool {
        self.observations
            .windows(2)
            .all(|w| w[0].0.succ_opt() == Some(w[1].0))
    }
}

/// Index ranges of the two estimation windows within a dated sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSplit {
    pub split_date: NaiveDate,
    pub pre: Range<usize>,
    pub onset: Range<usize>,
}

impl SampleSplit {
    pub fn new<T: Dated>(series: &[T], split_date: NaiveDate) -> Self {
        let cut = series.partition_point(|x| x.date() < split_date);
        Self {
            split_date,
            pre: 0..cut,
            onset: cut..series.len(),
        }
    }
}

/// Partition a date-sorted series into `(date < split, date >= split)`.
pub fn split_sample<T: Dated + Clone>(series: &[T], split_date: NaiveDate) -> (Vec<T>, Vec<T>) {
    let split = SampleSplit::new(series, split_date);
    (series[split.pre].to_vec(), series[split.onset].to_vec())
}

/// Day offset applied to worldwide SVI: `+1` when the exchange sits at or
/// east of `threshold_hours` from UTC, else `0`.
pub fn day_shift(utc_offset_hours: i32, threshold_hours: i32) -> u64 {
    u64::from(utc_offset_hours >= threshold_hours)
}

/// Relabel each observation to the exchange-local day whose session it precedes.
pub fn shift_to_exchange_day(svi: &SviSeries, calendar: &TradingCalendar, threshold_hours: i32) -> SviSeries {
    let shift = day_shift(calendar.utc_offset_hours, threshold_hours);
    let observations = svi
        .observations
        .iter()
        .map(|&(d, v)| (d + Days::new(shift), v))
        .collect();
    SviSeries {
        topic_id: svi.topic_id.clone(),
        observations,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Collapsed {
    pub series: SviSeries,
    /// Non-trading observations before the first trading day in the data.
    pub dropped_leading: usize,
    /// Observations after the calendar's last trading day.
    pub dropped_trailing: usize,
}

/// Fold every run of non-trading days into the preceding trading day by
/// taking the maximum, then drop the non-trading dates.
pub fn collapse_nontrading(svi: &SviSeries, calendar: &TradingCalendar) -> Collapsed {
    let last_day = calendar.last();
    let mut out: Vec<DatedValue> = Vec::with_capacity(svi.len());
    let mut dropped_leading = 0;
    let mut dropped_trailing = 0;
    for &(d, v) in &svi.observations {
        if last_day.is_none_or(|last| d > last) {
            dropped_trailing += 1;
        } else if calendar.is_trading_day(d) {
            out.push((d, v));
        } else if let Some(prev) = out.last_mut() {
            prev.1 = prev.1.max(v);
        } else {
            dropped_leading += 1;
        }
    }
    if dropped_leading > 0 {
        log::debug!(
            "{}/{}: dropped {dropped_leading} leading non-trading observations",
            calendar.country_code,
            svi.topic_id
        );
    }
    Collapsed {
        series: SviSeries {
            topic_id: svi.topic_id.clone(),
            observations: out,
        },
        dropped_leading,
        dropped_trailing,
    }
}

/// Rows present in every input series.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedTable {
    pub dates: Vec<NaiveDate>,
    /// One column per input series, in input order.
    pub columns: Vec<Vec<f64>>,
}

impl AlignedTable {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// Inner join of date-sorted series.
pub fn join_on_dates(series: &[&[DatedValue]]) -> Result<AlignedTable> {
    let Some((first, rest)) = series.split_first() else {
        return Err(Error::InvalidInput("nothing to join".into()));
    };
    let mut dates = Vec::new();
    let mut columns = vec![Vec::new(); series.len()];
    let mut cursors = vec![0usize; rest.len()];
    'outer: for &(d, v) in first.iter() {
        let mut row = Vec::with_capacity(rest.len());
        for (s, cur) in rest.iter().zip(cursors.iter_mut()) {
            while *cur < s.len() && s[*cur].0 < d {
                *cur += 1;
            }
            if *cur < s.len() && s[*cur].0 == d {
                row.push(s[*cur].1);
            } else {
                continue 'outer;
            }
        }
        dates.push(d);
        columns[0].push(v);
        for (c, v) in columns[1..].iter_mut().zip(row) {
            c.push(v);
        }
    }
    if dates.is_empty() {
        return Err(Error::EmptyJoin);
    }
    Ok(AlignedTable { dates, columns })
}

// ---------------------------------------------------------------------------
// file loading

fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn header_index(path: &Path, headers: &csv::StringRecord, expected: &[&str]) -> Result<Vec<usize>> {
    expected
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::parse(path, 1, format!("missing column `{name}`")))
        })
        .collect()
}

fn record_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn parse_date(path: &Path, line: u64, s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|e| Error::parse(path, line, format!("bad date `{s}`: {e}")))
}

fn is_missing(s: &str) -> bool {
    s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("nan")
}

fn parse_number(path: &Path, line: u64, field: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::parse(path, line, format!("bad {field} value `{s}`")))
}

fn records(path: &Path, rdr: &mut csv::Reader<File>) -> Result<Vec<csv::StringRecord>> {
    rdr.records()
        .map(|r| {
            r.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::parse(path, line, e.to_string())
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedOhlc {
    pub series: OhlcSeries,
    /// Dates whose missing close was replaced by the previous close.
    pub repaired_closes: Vec<NaiveDate>,
}

/// Load `<ISO2>.csv`. A missing open/high/low anywhere rejects the whole
/// country; a missing close is carried forward from the prior bar.
pub fn load_ohlc(path: &Path, calendar: &TradingCalendar) -> Result<LoadedOhlc> {
    let country = calendar.country_code.clone();
    let mut rdr = open_csv(path)?;
    let headers = rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?.clone();
    let idx = header_index(path, &headers, &["date", "open", "high", "low", "close"])?;
    let mut bars = Vec::new();
    let mut repaired = Vec::new();
    for rec in records(path, &mut rdr)? {
        let line = record_line(&rec);
        let field = |i: usize| rec.get(idx[i]).unwrap_or("");
        let date = parse_date(path, line, field(0))?;
        let mut px = [0.0; 4];
        for (k, name) in ["open", "high", "low"].iter().enumerate() {
            let raw = field(k + 1);
            if is_missing(raw) {
                return Err(Error::CountryRejected {
                    country,
                    reason: format!("missing {name} on {date} ({}:{line})", path.display()),
                });
            }
            px[k] = parse_number(path, line, name, raw)?;
        }
        let raw_close = field(4);
        px[3] = if is_missing(raw_close) {
            let prev: &OhlcBar = bars.last().ok_or_else(|| Error::CountryRejected {
                country: country.clone(),
                reason: format!("missing close on first bar {date}"),
            })?;
            log::info!("{country}: close on {date} repaired from previous close");
            repaired.push(date);
            prev.close
        } else {
            parse_number(path, line, "close", raw_close)?
        };
        bars.push(OhlcBar {
            date,
            open: px[0],
            high: px[1],
            low: px[2],
            close: px[3],
        });
    }
    let series = OhlcSeries::new(country, bars, calendar)?;
    Ok(LoadedOhlc {
        series,
        repaired_closes: repaired,
    })
}

/// Load `<ISO2>_calendar.csv`.
pub fn load_calendar(path: &Path, country_code: &str, utc_offset_hours: i32) -> Result<TradingCalendar> {
    let mut rdr = open_csv(path)?;
    let headers = rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?.clone();
    let idx = header_index(path, &headers, &["date"])?[0];
    let mut days = Vec::new();
    for rec in records(path, &mut rdr)? {
        let line = record_line(&rec);
        days.push(parse_date(path, line, rec.get(idx).unwrap_or(""))?);
    }
    TradingCalendar::new(country_code, days, utc_offset_hours)
}

/// Load a long-format SVI file into one series per topic (sorted by topic id).
pub fn load_svi(path: &Path) -> Result<Vec<SviSeries>> {
    let mut rdr = open_csv(path)?;
    let headers = rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?.clone();
    let idx = header_index(path, &headers, &["date", "topic", "value"])?;
    let mut by_topic: BTreeMap<String, Vec<DatedValue>> = BTreeMap::new();
    for rec in records(path, &mut rdr)? {
        let line = record_line(&rec);
        let date = parse_date(path, line, rec.get(idx[0]).unwrap_or(""))?;
        let topic = rec.get(idx[1]).unwrap_or("").to_string();
        if topic.is_empty() {
            return Err(Error::parse(path, line, "empty topic"));
        }
        let value = parse_number(path, line, "value", rec.get(idx[2]).unwrap_or(""))?;
        if !(0.0..=100.0).contains(&value) {
            return Err(Error::parse(path, line, format!("value {value} outside [0, 100]")));
        }
        by_topic.entry(topic).or_default().push((date, value));
    }
    by_topic
        .into_iter()
        .map(|(topic, mut obs)| {
            obs.sort_by_key(|o| o.0);
            if let Some(w) = obs.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidInput(format!(
                    "{}: duplicate {} for topic {topic}",
                    path.display(),
                    w[0].0
                )));
            }
            let s = SviSeries::new(topic, obs)?;
            if !s.is_daily_contiguous() {
                return Err(Error::InvalidInput(format!(
                    "{}: topic {} is not daily contiguous",
                    path.display(),
                    s.topic_id
                )));
            }
            Ok(s)
        })
        .collect()
}

/// One row of `countries.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryRecord {
    pub name: String,
    pub utc_offset_hours: i32,
    pub meta: CountryMeta,
}

pub fn load_countries(path: &Path) -> Result<Vec<CountryRecord>> {
    let mut rdr = open_csv(path)?;
    let headers = rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?.clone();
    let idx = header_index(
        path,
        &headers,
        &[
            "iso2",
            "name",
            "utc_offset_hours",
            "capital_lat",
            "capital_lon",
            "exports_to_rus",
            "imports_from_rus",
            "gdp",
        ],
    )?;
    let mut out = Vec::new();
    for rec in records(path, &mut rdr)? {
        let line = record_line(&rec);
        let f = |i: usize| rec.get(idx[i]).unwrap_or("");
        let num = |i: usize, name: &str| parse_number(path, line, name, f(i));
        let offset = f(2)
            .parse::<i32>()
            .map_err(|_| Error::parse(path, line, format!("bad utc_offset_hours `{}`", f(2))))?;
        let meta = CountryMeta::new(
            f(0),
            num(3, "capital_lat")?,
            num(4, "capital_lon")?,
            num(5, "exports_to_rus")?,
            num(6, "imports_from_rus")?,
            num(7, "gdp")?,
        )
        .map_err(|e| Error::parse(path, line, e.to_string()))?;
        out.push(CountryRecord {
            name: f(1).to_string(),
            utc_offset_hours: offset,
            meta,
        });
    }
    out.sort_by(|a, b| a.meta.iso2.cmp(&b.meta.iso2));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn weekdays(from: &str, to: &str) -> Vec<NaiveDate> {
        use chrono::Datelike;
        d(from)
            .iter_days()
            .take_while(|x| *x <= d(to))
            .filter(|x| x.weekday().number_from_monday() <= 5)
            .collect()
    }

    fn cal(days: Vec<NaiveDate>, offset: i32) -> TradingCalendar {
        TradingCalendar::new("XX", days, offset).unwrap()
    }

    fn svi(obs: &[(&str, f64)]) -> SviSeries {
        SviSeries::new("t", obs.iter().map(|&(s, v)| (d(s), v)).collect()).unwrap()
    }

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        let mut f = File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn load_three_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "AT.csv",
            "date,open,high,low,close\n2022-01-03,10,11,9,10.5\n2022-01-04,10.5,11,10,10.8\n2022-01-05,10.8,11.2,10.1,11\n",
        );
        let c = cal(weekdays("2022-01-03", "2022-01-07"), 1);
        let loaded = load_ohlc(&p, &c).unwrap();
        assert_eq!(loaded.series.len(), 3);
        assert!(loaded.repaired_closes.is_empty());
    }

    #[test]
    fn high_below_low_names_date() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "AT.csv",
            "date,open,high,low,close\n2022-01-03,10,11,9,10.5\n2022-01-04,10,9,11,10\n",
        );
        let c = cal(weekdays("2022-01-03", "2022-01-07"), 1);
        match load_ohlc(&p, &c) {
            Err(Error::InvalidBar { date, .. }) => assert_eq!(date, d("2022-01-04")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_high_rejects_country() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "AT.csv",
            "date,open,high,low,close\n2022-01-03,10,11,9,10.5\n2022-01-04,10,,9.5,10\n",
        );
        let c = cal(weekdays("2022-01-03", "2022-01-07"), 1);
        assert!(matches!(load_ohlc(&p, &c), Err(Error::CountryRejected { .. })));
    }

    #[test]
    fn missing_close_is_carried_forward() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "AT.csv",
            "date,open,high,low,close\n2022-01-03,10,11,9,10.5\n2022-01-04,10.4,10.6,10.2,\n",
        );
        let c = cal(weekdays("2022-01-03", "2022-01-07"), 1);
        let loaded = load_ohlc(&p, &c).unwrap();
        assert_eq!(loaded.series.bars()[1].close, 10.5);
        assert_eq!(loaded.repaired_closes, vec![d("2022-01-04")]);
    }

    #[test]
    fn malformed_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "AT.csv",
            "date,open,high,low,close\n2022-01-03,10,11,9,10.5\n2022-01-04,abc,11,9,10\n",
        );
        let c = cal(weekdays("2022-01-03", "2022-01-07"), 1);
        match load_ohlc(&p, &c) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file() {
        let c = cal(vec![], 0);
        assert!(matches!(
            load_ohlc(Path::new("/nonexistent/XX.csv"), &c),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn svi_long_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "conflict.csv",
            "date,topic,value\n2022-01-01,b,3\n2022-01-01,a,1\n2022-01-02,a,2\n2022-01-02,b,4\n",
        );
        let s = load_svi(&p).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].topic_id, "a");
        assert_eq!(s[1].values(), vec![3.0, 4.0]);
    }

    #[test]
    fn shift_rules() {
        let s = svi(&[("2022-01-03", 1.0), ("2022-01-04", 2.0)]);
        let americas = shift_to_exchange_day(&s, &cal(vec![], -6), DEFAULT_TZ_SHIFT_THRESHOLD);
        assert_eq!(americas, s);
        let asia = shift_to_exchange_day(&s, &cal(vec![], 9), DEFAULT_TZ_SHIFT_THRESHOLD);
        assert_eq!(asia.observations()[0], (d("2022-01-04"), 1.0));
        assert_eq!(asia.observations()[1], (d("2022-01-05"), 2.0));
        let empty = SviSeries::new("t", vec![]).unwrap();
        assert!(shift_to_exchange_day(&empty, &cal(vec![], 9), 3).is_empty());
    }

    #[test]
    fn weekend_collapse_takes_max() {
        // 2022-01-07 is a Friday
        let c = cal(weekdays("2022-01-03", "2022-01-10"), 1);
        let s = svi(&[
            ("2022-01-06", 1.0),
            ("2022-01-07", 3.0),
            ("2022-01-08", 5.0),
            ("2022-01-09", 4.0),
            ("2022-01-10", 2.0),
        ]);
        let out = collapse_nontrading(&s, &c).series;
        assert_eq!(
            out.observations(),
            &[(d("2022-01-06"), 1.0), (d("2022-01-07"), 5.0), (d("2022-01-10"), 2.0)]
        );
    }

    #[test]
    fn holiday_collapse() {
        let mut days = weekdays("2022-01-03", "2022-01-07");
        days.retain(|x| *x != d("2022-01-05"));
        let c = cal(days, 1);
        let s = svi(&[("2022-01-04", 2.0), ("2022-01-05", 7.0), ("2022-01-06", 1.0)]);
        let out = collapse_nontrading(&s, &c).series;
        assert_eq!(out.observations(), &[(d("2022-01-04"), 7.0), (d("2022-01-06"), 1.0)]);
    }

    #[test]
    fn no_gaps_unchanged_and_leading_run_dropped() {
        let c = cal(weekdays("2022-01-03", "2022-01-07"), 1);
        let s = svi(&[("2022-01-03", 2.0), ("2022-01-04", 3.0)]);
        assert_eq!(collapse_nontrading(&s, &c).series, s);
        let lead = svi(&[("2022-01-01", 9.0), ("2022-01-02", 9.0), ("2022-01-03", 1.0)]);
        let out = collapse_nontrading(&lead, &c);
        assert_eq!(out.dropped_leading, 2);
        assert_eq!(out.series.observations(), &[(d("2022-01-03"), 1.0)]);
    }

    #[test]
    fn split_examples() {
        let dates = vec![d("2021-12-31"), d("2022-01-03")];
        let (pre, onset) = split_sample(&dates, default_split_date());
        assert_eq!(pre, vec![d("2021-12-31")]);
        assert_eq!(onset, vec![d("2022-01-03")]);
        let (pre, onset) = split_sample(&dates, d("2021-12-15"));
        assert!(pre.is_empty());
        assert_eq!(onset.len(), 2);
        let (pre, onset) = split_sample(&dates, d("2023-01-01"));
        assert_eq!(pre.len(), 2);
        assert!(onset.is_empty());
    }

    #[test]
    fn join_examples() {
        let a = vec![(d("2022-01-03"), 1.0), (d("2022-01-04"), 2.0)];
        let b = vec![(d("2022-01-03"), 10.0), (d("2022-01-04"), 20.0)];
        let t = join_on_dates(&[&a, &b]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.columns[1], vec![10.0, 20.0]);

        let c = vec![(d("2022-02-03"), 1.0)];
        assert!(matches!(join_on_dates(&[&a, &c]), Err(Error::EmptyJoin)));

        let e = vec![(d("2022-01-04"), 5.0), (d("2022-01-05"), 6.0)];
        let t = join_on_dates(&[&a, &e]).unwrap();
        assert_eq!(t.dates, vec![d("2022-01-04")]);
        assert_eq!(t.columns, vec![vec![2.0], vec![5.0]]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_case() -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
            (5usize..40).prop_flat_map(|n| {
                (
                    proptest::collection::vec(any::<bool>(), n),
                    proptest::collection::vec(0.0f64..=100.0, n),
                )
            })
        }

        fn build(trading: &[bool], values: &[f64]) -> (TradingCalendar, SviSeries) {
            let start = d("2022-01-01");
            let days: Vec<_> = (0..trading.len())
                .filter(|&i| trading[i])
                .map(|i| start + Days::new(i as u64))
                .collect();
            let obs = values
                .iter()
                .enumerate()
                .map(|(i, &v)| (start + Days::new(i as u64), v))
                .collect();
            (cal(days, 0), SviSeries::new("p", obs).unwrap())
        }

        proptest! {
            #[test]
            fn collapse_is_idempotent((trading, values) in arb_case()) {
                let (c, s) = build(&trading, &values);
                let once = collapse_nontrading(&s, &c).series;
                let twice = collapse_nontrading(&once, &c).series;
                prop_assert_eq!(&once, &twice);
                // output dates are exactly the trading days at or after the first one
                let expected: Vec<_> = c.trading_days().to_vec();
                let got: Vec<_> = once.dates().collect();
                prop_assert_eq!(got, expected);
            }

            #[test]
            fn split_partitions(values in proptest::collection::vec(0.0f64..1.0, 0..50), cut in 0u64..60) {
                let start = d("2022-01-01");
                let s: Vec<DatedValue> = values.iter().enumerate()
                    .map(|(i, &v)| (start + Days::new(i as u64), v)).collect();
                let (pre, onset) = split_sample(&s, start + Days::new(cut));
                prop_assert!(pre.iter().all(|x| x.0 < start + Days::new(cut)));
                prop_assert!(onset.iter().all(|x| x.0 >= start + Days::new(cut)));
                let mut joined = pre.clone();
                joined.extend(onset);
                prop_assert_eq!(joined, s);
            }

            #[test]
            fn shift_preserves_values(values in proptest::collection::vec(0.0f64..=100.0, 0..30), offset in -12i32..=14) {
                let start = d("2022-01-01");
                let s = SviSeries::new("p", values.iter().enumerate()
                    .map(|(i, &v)| (start + Days::new(i as u64), v)).collect()).unwrap();
                let shifted = shift_to_exchange_day(&s, &cal(vec![], offset), 3);
                prop_assert_eq!(shifted.values(), s.values());
            }
        }
    }
}
