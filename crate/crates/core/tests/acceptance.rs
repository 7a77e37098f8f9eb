//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. All tolerances and seeds are fixed here.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use attnvol::calendar::OhlcBar;
use attnvol::exec::{map_range, ExecMode};
use attnvol::panel::{cips_from_series, driscoll_kraay_cov, fe_within, CipsOptions, CipsVerdict, PanelData, UnitBlock};
use attnvol::regression::{
    default_nw_lags, hc0_cov, ljung_box, newey_west_cov, ols_fit, white_test, RegressionData, DEFAULT_LB_LAGS,
};
use attnvol::simulate::{gbm_session, har_process, write_fixture, HarProcess};
use attnvol::volatility::{garman_klass, parkinson, realized_range, rogers_satchell, LogRangeTriple};
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed of the bundled 51-country fixture, fixed before any result was seen.
const FIXTURE_SEED: u64 = 20_220_224;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c1_estimator_consistency() -> Outcome {
    const DAYS: usize = 10_000;
    const VAR: f64 = 1e-4;
    const OVERNIGHT: f64 = 2.5e-5;
    const TOL: f64 = 0.05;
    let start = Instant::now();
    let mut r = rng(1);
    let mut sums = [0.0f64; 4];
    let mut prev_close = 100.0;
    for _ in 0..DAYS {
        let open = prev_close * (OVERNIGHT.sqrt() * normal(&mut r) - 0.5 * OVERNIGHT).exp();
        let bar: OhlcBar = gbm_session(&mut r, open, VAR, 390);
        let t = LogRangeTriple::from_bar(&bar);
        sums[0] += parkinson(t);
        sums[1] += garman_klass(t);
        sums[2] += rogers_satchell(t);
        sums[3] += realized_range(&bar, Some(prev_close)).unwrap().value / 1e4;
        prev_close = bar.close;
    }
    let m: Vec<f64> = sums.iter().map(|s| s / DAYS as f64).collect();
    let rel = [m[0] / VAR - 1.0, m[1] / VAR - 1.0, m[2] / VAR - 1.0, m[3] / (VAR + OVERNIGHT) - 1.0];
    let secs = start.elapsed().as_secs_f64();
    outcome(
        rel.iter().all(|e| e.abs() < TOL) && secs < 30.0,
        format!(
            "relative bias PK {:+.4} GK {:+.4} RS {:+.4} composite {:+.4} (limit 0.05), {secs:.2}s (limit 30s)",
            rel[0], rel[1], rel[2], rel[3]
        ),
    )
}

fn c2_ols_oracle() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let data = random_regression(&mut r, 50, 4);
        let fit = ols_fit(&data).unwrap();
        let oracle = normal_equations(&rows_of(&data.x), data.y.as_slice());
        for j in 0..4 {
            worst = worst.max((fit.beta[j] - oracle[j]).abs());
        }
    }
    outcome(worst < 1e-10, format!("max |diff| {worst:.2e} over 100 systems (limit 1e-10)"))
}

fn c3_hac_oracle() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    let mut hc0_exact = true;
    for _ in 0..50 {
        let data = random_regression(&mut r, 20, 3);
        let fit = ols_fit(&data).unwrap();
        for lags in [0, 1, 2, 5] {
            let cov = newey_west_cov(&fit, &data, lags).unwrap();
            let oracle = newey_west_double_sum(&rows_of(&data.x), fit.residuals.as_slice(), lags);
            worst = worst.max(max_abs_diff(&cov, &oracle));
        }
        hc0_exact &= newey_west_cov(&fit, &data, 0).unwrap() == hc0_cov(&fit, &data).unwrap();
    }
    outcome(
        worst < 1e-10 && hc0_exact,
        format!("max |diff| {worst:.2e} (limit 1e-10), lags 0 == HC0 exactly: {hc0_exact}"),
    )
}

fn c4_fe_oracle() -> Outcome {
    let mut r = rng(4);
    let mut worst_fe: f64 = 0.0;
    for _ in 0..50 {
        let mut blocks: Vec<UnitBlock> = Vec::new();
        let mut raw = Vec::new();
        for u in 0..5 {
            let alpha = 2.0 * normal(&mut r);
            let xs: Mat = (0..40).map(|_| vec![normal(&mut r) + alpha, normal(&mut r)]).collect();
            let ys: Vec<f64> = xs.iter().map(|x| alpha + 0.7 * x[0] - 1.2 * x[1] + normal(&mut r)).collect();
            blocks.push((format!("u{u}"), (0..40).map(day).collect(), ys.clone(), xs.clone()));
            raw.push((ys, xs));
        }
        let panel = PanelData::from_units(blocks, vec!["a".into(), "b".into()]).unwrap();
        let fit = fe_within(&panel).unwrap();
        let oracle = lsdv_slopes(&raw);
        for j in 0..2 {
            worst_fe = worst_fe.max((fit.beta[j] - oracle[j]).abs());
        }
    }
    let mut worst_dk: f64 = 0.0;
    for lags in [0, 1, 2, 4] {
        let xs: Mat = (0..60).map(|_| vec![normal(&mut r), normal(&mut r)]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 + x[0] + normal(&mut r)).collect();
        let panel = PanelData::from_units(vec![("one".into(), (0..60).map(day).collect(), ys, xs)], vec!["a".into(), "b".into()]).unwrap();
        let fit = fe_within(&panel).unwrap();
        let dk = driscoll_kraay_cov(&fit, &panel, lags).unwrap();
        let data = fit.demeaned_data().unwrap();
        let nw = newey_west_cov(&ols_fit(&data).unwrap(), &data, lags).unwrap();
        worst_dk = worst_dk.max((dk - nw).amax());
    }
    outcome(
        worst_fe < 1e-8 && worst_dk < 1e-12,
        format!("FE vs LSDV {worst_fe:.2e} (limit 1e-8), DK(N=1) vs NW {worst_dk:.2e} (limit 1e-12)"),
    )
}

fn rejection_rate(reps: usize, seed: u64, f: impl Fn(&mut ChaCha8Rng) -> f64 + Sync + Send) -> f64 {
    let p = map_range(ExecMode::Parallel, reps, |i| f(&mut rng(seed * 1_000_003 + i as u64)));
    p.iter().filter(|&&p| p < 0.05).count() as f64 / reps as f64
}

fn white_p(r: &mut ChaCha8Rng, heteroskedastic: bool) -> f64 {
    let n = 500;
    let x: Vec<f64> = (0..n).map(|_| normal(r)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|&xi| 1.0 + 0.5 * xi + if heteroskedastic { xi.abs() } else { 1.0 } * normal(r))
        .collect();
    let data: RegressionData = simple_regression(y, x);
    let fit = ols_fit(&data).unwrap();
    white_test(&fit, &data, true).unwrap().p
}

fn c5_test_size_power() -> Outcome {
    const REPS: usize = 2000;
    let w_size = rejection_rate(REPS, 51, |r| white_p(r, false));
    let w_power = rejection_rate(REPS, 52, |r| white_p(r, true));
    let lb_size = rejection_rate(REPS, 53, |r| {
        let e: Vec<f64> = (0..500).map(|_| normal(r)).collect();
        ljung_box(&e, DEFAULT_LB_LAGS).unwrap().p
    });
    let lb_power = rejection_rate(REPS, 54, |r| ljung_box(&ar1(r, 500, 0.9), DEFAULT_LB_LAGS).unwrap().p);
    let in_band = |s: f64| (0.035..=0.065).contains(&s);
    outcome(
        in_band(w_size) && in_band(lb_size) && w_power > 0.95 && lb_power > 0.95,
        format!(
            "size White {w_size:.4} LB {lb_size:.4} (band 0.035-0.065), power White {w_power:.4} LB {lb_power:.4} (limit 0.95)"
        ),
    )
}

fn panel_series(r: &mut ChaCha8Rng, n: usize, t: usize, phi: f64) -> Vec<(String, Vec<(chrono::NaiveDate, f64)>)> {
    (0..n)
        .map(|i| {
            let mut level = 0.0;
            let obs = (0..t)
                .map(|s| {
                    level = phi * level + normal(r);
                    (day(s), level)
                })
                .collect();
            (format!("u{i}"), obs)
        })
        .collect()
}

fn c6_cips() -> Outcome {
    const REPS: usize = 200;
    const STATIONARY_PHI: f64 = 0.8;
    let opts = CipsOptions::default();
    let verdicts = |phi: f64, seed: u64| {
        map_range(ExecMode::Parallel, REPS, |i| {
            let s = panel_series(&mut rng(seed + i as u64), 10, 200, phi);
            cips_from_series(&s, &opts).unwrap().verdict
        })
    };
    let unit = verdicts(1.0, 6_000);
    let stat = verdicts(STATIONARY_PHI, 7_000);
    let keep = unit.iter().filter(|v| **v == CipsVerdict::FailToReject).count() as f64 / REPS as f64;
    let rej = stat.iter().filter(|v| **v == CipsVerdict::RejectUnitRoot).count() as f64 / REPS as f64;
    outcome(
        keep >= 0.9 && rej >= 0.9,
        format!("unit root kept {keep:.3}, stationary (phi 0.8) rejected {rej:.3} (limit 0.90 each)"),
    )
}

fn c7_parameter_recovery() -> Outcome {
    const REPS: usize = 200;
    let process = HarProcess::default();
    let covered = map_range(ExecMode::Parallel, REPS, |i| {
        let data = har_process(&mut rng(70_000 + i as u64), &process, 2000).unwrap();
        let fit = ols_fit(&data).unwrap();
        let cov = newey_west_cov(&fit, &data, default_nw_lags(data.n())).unwrap();
        (0..5).all(|j| (fit.beta[j] - process.beta[j]).abs() <= 3.0 * cov[(j, j)].sqrt())
    });
    let share = covered.iter().filter(|c| **c).count() as f64 / REPS as f64;
    outcome(
        share >= 0.95,
        format!("all five coefficients within 3 NW s.e. in {share:.3} of replications (limit 0.95)"),
    )
}

fn run_cli(conf: &Path, out: &Path) -> (Option<i32>, Duration) {
    let start = Instant::now();
    let st = Command::new(env!("CARGO_BIN_EXE_attnvol"))
        .args(["run", "--config"])
        .arg(conf)
        .arg("--out")
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("run binary");
    (st.code(), start.elapsed())
}

fn column(header: &csv::StringRecord, name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("column {name}"))
}

fn c8_qualitative(dir: &Path) -> Outcome {
    let fx = dir.join("fixture");
    let summary = write_fixture(&fx, FIXTURE_SEED, 51).unwrap();
    let out = dir.join("run_a");
    let (code, took) = run_cli(&summary.config_path, &out);

    let mut rdr = csv::Reader::from_path(out.join("country_fits.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let (s, m, p) = (column(&h, "sample"), column(&h, "model"), column(&h, "p_c_att"));
    let (mut pre_sig, mut pre_n, mut on_sig, mut on_n) = (0, 0, 0, 0);
    for rec in rdr.records() {
        let rec = rec.unwrap();
        if &rec[m] != "base" {
            continue;
        }
        let pv: f64 = rec[p].parse().unwrap();
        match &rec[s] {
            "pre" => {
                pre_n += 1;
                pre_sig += usize::from(pv <= 0.05);
            }
            _ => {
                on_n += 1;
                on_sig += usize::from(pv < 0.05);
            }
        }
    }
    let mut rdr = csv::Reader::from_path(out.join("panel_fits.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let (s, m) = (column(&h, "sample"), column(&h, "model"));
    let (bd, bk) = (column(&h, "beta_c_doo"), column(&h, "beta_c_dist"));
    let (mut doo, mut dist) = (f64::NAN, f64::NAN);
    for rec in rdr.records() {
        let rec = rec.unwrap();
        match (&rec[s], &rec[m]) {
            ("onset", "FE-DK-DOO") => doo = rec[bd].parse().unwrap(),
            ("onset", "FE-DK-Dist") => dist = rec[bk].parse().unwrap(),
            _ => {}
        }
    }
    let share = on_sig as f64 / on_n.max(1) as f64;
    let pass = code == Some(0)
        && pre_n == 51
        && on_n == 51
        && pre_sig == 0
        && share >= 0.70
        && doo > 0.0
        && dist < 0.0
        && took.as_secs_f64() < 60.0;
    outcome(
        pass,
        format!(
            "seed {FIXTURE_SEED}: exit {code:?}; pre-period C significant in {pre_sig}/{pre_n} (need 0); \
             onset significant {on_sig}/{on_n} = {share:.3} (need 0.70); C*DOO {doo:+.4} (need > 0); \
             C*Dist {dist:+.4} (need < 0); {:.2}s (limit 60s)",
            took.as_secs_f64()
        ),
    )
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn c9_determinism(dir: &Path) -> Outcome {
    let conf = dir.join("fixture").join("attnvol.conf");
    let b = dir.join("run_b");
    let c = dir.join("run_c");
    let (cb, _) = run_cli(&conf, &b);
    let (cc, _) = run_cli(&conf, &c);
    let (tb, tc) = (tree(&b), tree(&c));
    let same = tb == tc && !tb.is_empty();
    outcome(
        same && cb == cc,
        format!("{} files compared, byte-identical: {same}", tb.len()),
    )
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 estimator consistency", Box::new(c1_estimator_consistency)),
        ("2 OLS oracle", Box::new(c2_ols_oracle)),
        ("3 HAC oracle", Box::new(c3_hac_oracle)),
        ("4 FE/DK oracle", Box::new(c4_fe_oracle)),
        ("5 White/Ljung-Box size and power", Box::new(c5_test_size_power)),
        ("6 CIPS size and power", Box::new(c6_cips)),
        ("7 HAR-X parameter recovery", Box::new(c7_parameter_recovery)),
        ("8 qualitative replication on the 51-country fixture", Box::new(|| c8_qualitative(tmp.path()))),
        ("9 determinism", Box::new(|| c9_determinism(tmp.path()))),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let o = f();
        failed += usize::from(!o.pass);
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
