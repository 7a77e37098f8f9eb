//! Run configuration: a flat `key = value` file.
//!
//! Blank lines and lines starting with `#` are ignored. Keys:
//!
//! | key | default |
//! |-----|---------|
//! | `data_dir` | required, relative paths resolve against the config file |
//! | `split_date` | `2022-01-01` |
//! | `robustness_splits` | `2021-12-01, 2021-12-15, 2022-01-15` |
//! | `run_robustness` | `true` |
//! | `log_variance` | `false` |
//! | `log_offset` | `1` |
//! | `nw_lags`, `dk_lags` | lag rule on the sample length |
//! | `dummy_set.<name>` | dates and `a..b` ranges, comma separated |
//! | `interaction` | `both` (`none`, `doo`, `dist`, `both`) |
//! | `attention_scope` | `worldwide` (`worldwide`, `local`) |
//! | `zero_offset` | `1` |
//! | `tz_shift_threshold_hours` | `3` |
//! | `lb_lags` | `5` |
//! | `white_cross_products` | `true` |
//! | `adf_lags` | `1` |
//! | `cips_trend` | `false` |
//! | `conflict_topics`, `general_topics` | built-in topic lists |
//! | `threads` | all cores; `ATTNVOL_THREADS` wins |
//! | `format` | `both` (`csv`, `markdown`, `both`) |
//!
//! Without any `dummy_set.*` key the sets `invasion_week`
//! (2022-02-21..2022-02-25), `feb21` and `feb24` are used.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;

use crate::attention::{DEFAULT_CONFLICT_TOPICS, DEFAULT_GENERAL_TOPICS, DEFAULT_ZERO_OFFSET};
use crate::calendar::{default_split_date, DEFAULT_TZ_SHIFT_THRESHOLD};
use crate::panel::Interaction;
use crate::regression::DEFAULT_LB_LAGS;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionSet {
    None,
    Doo,
    Dist,
    Both,
}

impl InteractionSet {
    pub fn interactions(self) -> Vec<Interaction> {
        match self {
            InteractionSet::None => vec![],
            InteractionSet::Doo => vec![Interaction::Doo],
            InteractionSet::Dist => vec![Interaction::Dist],
            InteractionSet::Both => vec![Interaction::Doo, Interaction::Dist],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttentionScope {
    Worldwide,
    /// Conflict attention from `conflict_<ISO2>.csv`; general attention stays worldwide.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn markdown(self) -> bool {
        matches!(self, OutputFormat::Markdown | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_dir: PathBuf,
    pub split_date: NaiveDate,
    pub robustness_splits: Vec<NaiveDate>,
    pub run_robustness: bool,
    pub log_variance: bool,
    pub log_offset: f64,
    pub nw_lags: Option<usize>,
    pub dk_lags: Option<usize>,
    pub dummy_sets: BTreeMap<String, BTreeSet<NaiveDate>>,
    pub interaction: InteractionSet,
    pub attention_scope: AttentionScope,
    pub zero_offset: f64,
    pub tz_shift_threshold_hours: i32,
    pub lb_lags: usize,
    pub white_cross_products: bool,
    pub adf_lags: usize,
    pub cips_trend: bool,
    pub conflict_topics: Vec<String>,
    pub general_topics: Vec<String>,
    pub threads: Option<usize>,
    pub format: OutputFormat,
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}

pub fn default_dummy_sets() -> BTreeMap<String, BTreeSet<NaiveDate>> {
    let mut sets = BTreeMap::new();
    sets.insert("invasion_week".to_string(), ymd(2022, 2, 21).iter_days().take(5).collect());
    sets.insert("feb21".to_string(), BTreeSet::from([ymd(2022, 2, 21)]));
    sets.insert("feb24".to_string(), BTreeSet::from([ymd(2022, 2, 24)]));
    sets
}

impl RunConfig {
    /// Defaults for everything except the data directory.
    pub fn with_data_dir(data_dir: impl Into<PathBuf>) -> Self {
        Self {
            data_dir: data_dir.into(),
            split_date: default_split_date(),
            robustness_splits: vec![ymd(2021, 12, 1), ymd(2021, 12, 15), ymd(2022, 1, 15)],
            run_robustness: true,
            log_variance: false,
            log_offset: 1.0,
            nw_lags: None,
            dk_lags: None,
            dummy_sets: default_dummy_sets(),
            interaction: InteractionSet::Both,
            attention_scope: AttentionScope::Worldwide,
            zero_offset: DEFAULT_ZERO_OFFSET,
            tz_shift_threshold_hours: DEFAULT_TZ_SHIFT_THRESHOLD,
            lb_lags: DEFAULT_LB_LAGS,
            white_cross_products: true,
            adf_lags: 1,
            cips_trend: false,
            conflict_topics: DEFAULT_CONFLICT_TOPICS.iter().map(|s| s.to_string()).collect(),
            general_topics: DEFAULT_GENERAL_TOPICS.iter().map(|s| s.to_string()).collect(),
            threads: None,
            format: OutputFormat::Both,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parse config text; relative `data_dir` is joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            entries.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let data_dir = entries
            .iter()
            .find(|e| e.1 == "data_dir")
            .map(|e| e.2.clone())
            .ok_or_else(|| Error::Config("missing required key `data_dir`".into()))?;
        let data_dir = PathBuf::from(data_dir);
        let data_dir = if data_dir.is_absolute() { data_dir } else { base.join(data_dir) };
        let mut cfg = Self::with_data_dir(data_dir);
        let mut custom_dummies: Option<BTreeMap<String, BTreeSet<NaiveDate>>> = None;
        let mut seen = BTreeSet::new();

        for (line, key, value) in &entries {
            if !seen.insert(key.clone()) {
                return Err(Error::Config(format!("line {line}: duplicate key `{key}`")));
            }
            let bad = |what: &str| Error::Config(format!("line {line}: `{key}`: {what}"));
            if let Some(name) = key.strip_prefix("dummy_set.") {
                if name.is_empty() {
                    return Err(bad("empty set name"));
                }
                let dates = parse_date_set(value).map_err(|m| bad(&m))?;
                custom_dummies.get_or_insert_with(BTreeMap::new).insert(name.to_string(), dates);
                continue;
            }
            match key.as_str() {
                "data_dir" => {}
                "split_date" => cfg.split_date = parse_date(value).map_err(|m| bad(&m))?,
                "robustness_splits" => {
                    cfg.robustness_splits = split_list(value)
                        .map(parse_date)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|m| bad(&m))?
                }
                "run_robustness" => cfg.run_robustness = parse_bool(value).map_err(|m| bad(&m))?,
                "log_variance" => cfg.log_variance = parse_bool(value).map_err(|m| bad(&m))?,
                "log_offset" => cfg.log_offset = parse_num(value).map_err(|m| bad(&m))?,
                "nw_lags" => cfg.nw_lags = Some(parse_num(value).map_err(|m| bad(&m))?),
                "dk_lags" => cfg.dk_lags = Some(parse_num(value).map_err(|m| bad(&m))?),
                "interaction" => {
                    cfg.interaction = match value.as_str() {
                        "none" => InteractionSet::None,
                        "doo" => InteractionSet::Doo,
                        "dist" => InteractionSet::Dist,
                        "both" => InteractionSet::Both,
                        _ => return Err(bad("expected none, doo, dist or both")),
                    }
                }
                "attention_scope" => {
                    cfg.attention_scope = match value.as_str() {
                        "worldwide" => AttentionScope::Worldwide,
                        "local" => AttentionScope::Local,
                        _ => return Err(bad("expected worldwide or local")),
                    }
                }
                "zero_offset" => cfg.zero_offset = parse_num(value).map_err(|m| bad(&m))?,
                "tz_shift_threshold_hours" => {
                    cfg.tz_shift_threshold_hours = parse_num(value).map_err(|m| bad(&m))?
                }
                "lb_lags" => cfg.lb_lags = parse_num(value).map_err(|m| bad(&m))?,
                "white_cross_products" => cfg.white_cross_products = parse_bool(value).map_err(|m| bad(&m))?,
                "adf_lags" => cfg.adf_lags = parse_num(value).map_err(|m| bad(&m))?,
                "cips_trend" => cfg.cips_trend = parse_bool(value).map_err(|m| bad(&m))?,
                "conflict_topics" => cfg.conflict_topics = split_list(value).map(String::from).collect(),
                "general_topics" => cfg.general_topics = split_list(value).map(String::from).collect(),
                "threads" => {
                    let n: usize = parse_num(value).map_err(|m| bad(&m))?;
                    if n == 0 {
                        return Err(bad("must be positive"));
                    }
                    cfg.threads = Some(n);
                }
                "format" => {
                    cfg.format = match value.as_str() {
                        "csv" => OutputFormat::Csv,
                        "markdown" => OutputFormat::Markdown,
                        "both" => OutputFormat::Both,
                        _ => return Err(bad("expected csv, markdown or both")),
                    }
                }
                _ => return Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
            }
        }
        if let Some(d) = custom_dummies {
            cfg.dummy_sets = d;
        }
        if !(cfg.zero_offset > 0.0) {
            return Err(Error::Config("zero_offset must be positive".into()));
        }
        if cfg.log_variance && !(cfg.log_offset > 0.0) {
            return Err(Error::Config("log_offset must be positive".into()));
        }
        if cfg.conflict_topics.is_empty() || cfg.general_topics.is_empty() {
            return Err(Error::Config("topic lists must not be empty".into()));
        }
        Ok(cfg)
    }

    /// Input files the run needs that are not on disk.
    pub fn missing_inputs(&self) -> Vec<PathBuf> {
        let mut missing = Vec::new();
        if !self.data_dir.is_dir() {
            missing.push(self.data_dir.clone());
            return missing;
        }
        for f in ["countries.csv", "conflict.csv", "general.csv"] {
            let p = self.data_dir.join(f);
            if !p.is_file() {
                missing.push(p);
            }
        }
        missing
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_date(s: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|_| format!("bad date `{s}`"))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}

fn parse_num<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("bad number `{s}`"))
}

/// `2022-02-24, 2022-02-21..2022-02-25` (ranges inclusive).
pub fn parse_date_set(value: &str) -> std::result::Result<BTreeSet<NaiveDate>, String> {
    let mut out = BTreeSet::new();
    for item in split_list(value) {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse_date(a)?, parse_date(b)?);
                if b < a {
                    return Err(format!("empty range `{item}`"));
                }
                out.extend(a.iter_days().take_while(|d| *d <= b));
            }
            None => {
                out.insert(parse_date(item)?);
            }
        }
    }
    if out.is_empty() {
        return Err("no dates".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = RunConfig::parse("data_dir = data\n", Path::new("/x")).unwrap();
        assert_eq!(cfg.data_dir, PathBuf::from("/x/data"));
        assert_eq!(cfg.split_date, ymd(2022, 1, 1));
        assert_eq!(cfg.robustness_splits.len(), 3);
        assert_eq!(cfg.dummy_sets.len(), 3);
        assert_eq!(cfg.dummy_sets["invasion_week"].len(), 5);
        assert_eq!(cfg.interaction, InteractionSet::Both);
    }

    #[test]
    fn overrides_and_comments() {
        let text = "# c\ndata_dir=/abs\nsplit_date = 2021-12-15\nnw_lags = 3\ninteraction = doo\n\
                    dummy_set.w = 2022-02-21..2022-02-23, 2022-03-01\nformat = csv\n";
        let cfg = RunConfig::parse(text, Path::new("/x")).unwrap();
        assert_eq!(cfg.data_dir, PathBuf::from("/abs"));
        assert_eq!(cfg.split_date, ymd(2021, 12, 15));
        assert_eq!(cfg.nw_lags, Some(3));
        assert_eq!(cfg.interaction.interactions(), vec![Interaction::Doo]);
        assert_eq!(cfg.dummy_sets.len(), 1);
        assert_eq!(cfg.dummy_sets["w"].len(), 4);
        assert!(cfg.format.csv() && !cfg.format.markdown());
    }

    #[test]
    fn rejects_bad_input() {
        let base = Path::new(".");
        assert!(RunConfig::parse("split_date = 2022-01-01\n", base).is_err());
        assert!(RunConfig::parse("data_dir = d\nbogus = 1\n", base).is_err());
        assert!(RunConfig::parse("data_dir = d\nnw_lags = -1\n", base).is_err());
        assert!(RunConfig::parse("data_dir = d\nsplit_date = 2022-13-01\n", base).is_err());
        assert!(RunConfig::parse("data_dir = d\ndata_dir = e\n", base).is_err());
        assert!(RunConfig::parse("data_dir = d\nno equals sign\n", base).is_err());
        assert!(RunConfig::parse("data_dir = d\nthreads = 0\n", base).is_err());
    }

    #[test]
    fn date_set_ranges() {
        assert!(parse_date_set("2022-02-25..2022-02-21").is_err());
        assert_eq!(parse_date_set("2022-02-21..2022-02-21").unwrap().len(), 1);
    }
}
