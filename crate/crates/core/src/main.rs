use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use attnvol::config::RunConfig;
use attnvol::pipeline::{self, RunResults};
use attnvol::{report, simulate, Result};

#[derive(Parser)]
#[command(name = "attnvol", version, about = "Search attention and stock market volatility")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis and write the report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: `out` next to the config file).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check configuration and inputs without fitting anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate the synthetic fixture dataset.
    Simulate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 51)]
        countries: usize,
    },
}

const EXIT_ERROR: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

fn run(config: PathBuf, out: Option<PathBuf>) -> Result<bool> {
    let cfg = RunConfig::load(&config)?;
    let out = out.unwrap_or_else(|| config.parent().unwrap_or(std::path::Path::new(".")).join("out"));
    let main = pipeline::run_pipeline(&cfg)?;
    report::write_report(&main, &out, cfg.format)?;
    summarize(&main, "main");
    let mut partial = !main.skipped.is_empty();
    if cfg.run_robustness {
        for split in &cfg.robustness_splits {
            let mut alt = cfg.clone();
            alt.split_date = *split;
            match pipeline::run_pipeline(&alt) {
                Ok(res) => {
                    report::write_report(&res, &out.join("robustness").join(format!("split_{split}")), cfg.format)?;
                    summarize(&res, &format!("split {split}"));
                }
                Err(e) => {
                    log::error!("robustness split {split}: {e}");
                    partial = true;
                }
            }
        }
    }
    println!("report written to {}", out.display());
    Ok(partial)
}

fn summarize(res: &RunResults, label: &str) {
    println!(
        "{label}: {} countries fitted, {} skipped, {} country models, {} panel models",
        res.series.len(),
        res.skipped.len(),
        res.fits.len(),
        res.panels.len()
    );
    for s in &res.skipped {
        println!("  skipped {}: {}", s.country, s.reason);
    }
}

fn validate(config: PathBuf) -> Result<bool> {
    let cfg = RunConfig::load(&config)?;
    let v = pipeline::validate(&cfg)?;
    println!("{} countries ready", v.countries_ok.len());
    for p in &v.problems {
        println!("  {}: {}", p.country, p.reason);
    }
    if v.countries_ok.is_empty() {
        return Err(attnvol::Error::InvalidInput("no usable country".into()));
    }
    Ok(!v.problems.is_empty())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out } => run(config, out),
        Command::Validate { config } => validate(config),
        Command::Simulate { seed, out, countries } => simulate::write_fixture(&out, seed, countries).map(|s| {
            println!(
                "wrote {} countries to {} (config: {})",
                s.countries.len(),
                out.display(),
                s.config_path.display()
            );
            false
        }),
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_PARTIAL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
