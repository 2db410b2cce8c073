use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semirv::asym::classify_and_predict;
use semirv::harness::{run_config_file, selfcheck, RunOptions};
use semirv::risk::{ruin_study, write_ruin_csv, RiskModelConfig};
use semirv::SemiRvDistribution;

#[derive(Parser)]
#[command(
    name = "semirv",
    version,
    about = "Convolution tails and ruin probabilities for semi-regularly varying distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the ratio studies of a config file.
    Study {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the dispatched prediction for a JSON array of distributions as CSV.
    Predict {
        #[arg(long)]
        dists: PathBuf,
        /// Geometric grid `start:end:count`.
        #[arg(long)]
        x_grid: String,
    },
    /// Print a Monte Carlo ruin study as CSV.
    Ruin {
        #[arg(long)]
        config: PathBuf,
        /// Geometric grid `start:end:count`.
        #[arg(long)]
        x_grid: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the built-in identity suite.
    Selfcheck,
}

fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected start:end:count, got {s:?}"));
    };
    let start: f64 = a.parse().map_err(|e| format!("start: {e}"))?;
    let end: f64 = b.parse().map_err(|e| format!("end: {e}"))?;
    let count: usize = n.parse().map_err(|e| format!("count: {e}"))?;
    if !(start > 0.0 && end >= start && count >= 1) {
        return Err("need 0 < start <= end and count >= 1".into());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let r = (end / start).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| start * (r * i as f64).exp()).collect())
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Study {
            config,
            out,
            parallel,
            seed,
        } => {
            let outcome = run_config_file(
                &config,
                &RunOptions {
                    out_dir: out,
                    parallel,
                    seed,
                },
            );
            for m in &outcome.messages {
                if outcome.exit_code == 0 {
                    println!("{m}");
                } else {
                    eprintln!("{m}");
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Command::Predict { dists, x_grid } => {
            let xs = match parse_grid(&x_grid) {
                Ok(xs) => xs,
                Err(e) => return fail(2, e),
            };
            let parsed = fs::read_to_string(&dists)
                .map_err(|e| e.to_string())
                .and_then(|t| {
                    serde_json::from_str::<Vec<SemiRvDistribution>>(&t).map_err(|e| e.to_string())
                });
            let ds = match parsed {
                Ok(ds) => ds,
                Err(e) => return fail(2, format!("{}: {e}", dists.display())),
            };
            let result =
                classify_and_predict(&ds).and_then(|p| p.write_csv(&xs, io::stdout().lock()));
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(1, e),
            }
        }
        Command::Ruin {
            config,
            x_grid,
            samples,
            seed,
        } => {
            let xs = match parse_grid(&x_grid) {
                Ok(xs) => xs,
                Err(e) => return fail(2, e),
            };
            let parsed = fs::read_to_string(&config)
                .map_err(|e| e.to_string())
                .and_then(|t| RiskModelConfig::from_json_str(&t).map_err(|e| e.to_string()));
            let c = match parsed {
                Ok(c) => c,
                Err(e) => return fail(2, format!("{}: {e}", config.display())),
            };
            match ruin_study(&c, &xs, samples, seed)
                .and_then(|rows| write_ruin_csv(&rows, io::stdout().lock()))
            {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(1, e),
            }
        }
        Command::Selfcheck => {
            let report = selfcheck();
            let mut out = io::stdout().lock();
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "{status} {} (worst {:.3e}, tolerance {:.1e})",
                    c.name, c.worst, c.tolerance
                );
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
