use std::hint::black_box;

use attnvol::calendar::OhlcBar;
use attnvol::config::RunConfig;
use attnvol::exec::{map_range, map_with, with_threads, ExecMode};
use attnvol::panel::{cips_from_series, CipsOptions};
use attnvol::pipeline::run_pipeline;
use attnvol::simulate::{gbm_session, write_fixture};
use attnvol::volatility::realized_range;
use chrono::NaiveDate;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn bars(n: usize) -> Vec<Vec<OhlcBar>> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    (0..64)
        .map(|_| (0..n / 64).map(|_| gbm_session(&mut rng, 100.0, 1e-4, 78)).collect())
        .collect()
}

fn volatility(c: &mut Criterion) {
    let chunks = bars(200_000);
    let mut g = c.benchmark_group("volatility_200k_bars");
    for (name, mode) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| {
                map_with(mode, &chunks, |chunk| {
                    chunk
                        .windows(2)
                        .map(|w| realized_range(&w[1], Some(w[0].close)).unwrap().value)
                        .sum::<f64>()
                })
            })
        });
    }
    g.finish();
}

fn cips_replications(c: &mut Criterion) {
    let opts = CipsOptions::default();
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let mut g = c.benchmark_group("cips_64_reps_n10_t200");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| {
                map_range(mode, 64, |rep| {
                    let mut rng = ChaCha8Rng::seed_from_u64(rep as u64);
                    let series: Vec<_> = (0..10)
                        .map(|i| {
                            let mut level = 0.0;
                            let obs = (0..200)
                                .map(|t| {
                                    let z: f64 = StandardNormal.sample(&mut rng);
                                    level += z;
                                    (start + chrono::Days::new(t), level)
                                })
                                .collect();
                            (format!("u{i}"), obs)
                        })
                        .collect();
                    black_box(cips_from_series(&series, &opts).unwrap().stat)
                })
            })
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let fx = write_fixture(dir.path(), 1, 51).unwrap();
    let cfg = RunConfig::load(&fx.config_path).unwrap();
    let mut g = c.benchmark_group("pipeline_51_countries");
    g.sample_size(10);
    for threads in [1usize, 0] {
        let label = if threads == 1 { "1 thread" } else { "default pool" };
        let pool = (threads > 0).then_some(threads);
        g.bench_with_input(BenchmarkId::from_parameter(label), &pool, |b, &pool| {
            b.iter(|| with_threads(pool, || run_pipeline(&cfg).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, volatility, cips_replications, pipeline);
criterion_main!(benches);
