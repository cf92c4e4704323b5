//! `hitnum`: sample, solve and analyse random set systems R(n, p).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hitnum_core::{
    curve, dense_h, dense_i, finite_window, lg_lambda, run_experiment, sample_system, second_moment, solve_min_hitting,
    sparse_h, ExperimentConfig, Lg, Regime, Seed, SetSystem,
};
use hitnum_core::harness::write_outputs;
use hitnum_core::solver::DEFAULT_NODE_BUDGET;

#[derive(Parser)]
#[command(name = "hitnum", version, about = "Minimum hitting sets of random set systems R(n, p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one system and write it in text format.
    Sample {
        #[command(flatten)]
        ground: Ground,
        #[arg(long, value_parser = parse_seed, default_value = "0")]
        seed: u64,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a system file exactly.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
    /// Print the expectation curve, the finite window and the asymptotic h and i.
    Predict {
        #[command(flatten)]
        ground: Ground,
    },
    /// Print second-moment diagnostics for X_m.
    Diagnose {
        #[command(flatten)]
        ground: Ground,
        #[arg(long)]
        m: usize,
    },
    /// Run seeded trials and write a CSV of records plus a JSON summary.
    Experiment {
        #[command(flatten)]
        ground: Ground,
        #[arg(long)]
        trials: u64,
        /// Master seed, decimal or 0x-prefixed hex.
        #[arg(long, value_parser = parse_seed, default_value = "0")]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
        /// CSV path; the summary goes next to it with a .json extension.
        #[arg(long)]
        out: PathBuf,
        /// Also count hitting sets of this size in every trial.
        #[arg(long)]
        count_xm: Option<usize>,
        /// Record wall-clock milliseconds in the CSV (breaks byte-identical reruns).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Args)]
struct Ground {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    regime: RegimeArgs,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct RegimeArgs {
    /// Dense regime, p = 2^(-beta n).
    #[arg(long)]
    beta: Option<f64>,
    /// Sparse regime, p = n^alpha / 2^n.
    #[arg(long)]
    alpha: Option<f64>,
    /// Explicit lg p.
    #[arg(long, allow_negative_numbers = true)]
    lg_p: Option<f64>,
}

impl RegimeArgs {
    fn regime(&self) -> Result<Regime> {
        let regime = match (self.beta, self.alpha, self.lg_p) {
            (Some(beta), _, _) => Regime::Dense { beta },
            (_, Some(alpha), _) => Regime::Sparse { alpha },
            (_, _, Some(lg_p)) => Regime::ExplicitLgP { lg_p: Lg::new(lg_p)? },
            _ => bail!("one of --beta, --alpha, --lg-p is required"),
        };
        regime.validate()?;
        Ok(regime)
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Sample { ground, seed, out: path } => {
            let sys = sample_system(ground.n, ground.regime.regime()?, Seed(seed))?;
            match path {
                Some(p) => sys.write_text(&p).with_context(|| format!("writing {}", p.display()))?,
                None => out.write_all(sys.to_text().as_bytes())?,
            }
        }
        Command::Solve { file, node_budget } => {
            let sys = SetSystem::read_text(&file).with_context(|| format!("reading {}", file.display()))?;
            let r = solve_min_hitting(&sys, Some(node_budget));
            let witness: Vec<String> = r.witness.to_one_based().iter().map(|v| v.to_string()).collect();
            writeln!(out, "size {}", r.size)?;
            writeln!(out, "witness {}", witness.join(" "))?;
            writeln!(out, "nodes {}", r.nodes)?;
            writeln!(out, "status {}", r.status.as_str())?;
        }
        Command::Predict { ground } => {
            let n = ground.n;
            let regime = ground.regime.regime()?;
            let lg_p = regime.lg_p(n)?;
            let c = curve(n, lg_p)?;
            writeln!(out, "lg_p {lg_p}")?;
            writeln!(out, "m,lg_lambda")?;
            for (m, v) in c.values.iter().enumerate() {
                writeln!(out, "{m},{v}")?;
            }
            let w = finite_window(&c);
            let support: Vec<String> = w.support.iter().map(|m| m.to_string()).collect();
            writeln!(out, "h_hat {}", w.h_hat)?;
            writeln!(out, "window {}", support.join(" "))?;
            match regime {
                Regime::Dense { beta } => {
                    let a = dense_h(n, beta)?;
                    writeln!(out, "asymptotic_h {} (phi {:.6}, delta {:.6})", a.h, a.phi, a.delta.unwrap_or(f64::NAN))?;
                    writeln!(out, "asymptotic_i {}", dense_i(n, beta)?)?;
                }
                Regime::Sparse { alpha } => {
                    let a = sparse_h(n, alpha)?;
                    writeln!(out, "asymptotic_h {} (phi {:.6})", a.h, a.phi)?;
                }
                Regime::ExplicitLgP { .. } => writeln!(out, "asymptotic_h none (explicit lg p)")?,
            }
        }
        Command::Diagnose { ground, m } => {
            let lg_p = ground.regime.regime()?.lg_p(ground.n)?;
            let d = second_moment(ground.n, m, lg_lambda(ground.n, m, lg_p)?)?;
            serde_json::to_writer_pretty(&mut out, &d)?;
            writeln!(out)?;
        }
        Command::Experiment { ground, trials, seed, workers, node_budget, out: csv_path, count_xm, timing } => {
            let config = ExperimentConfig {
                node_budget,
                workers,
                count_xm,
                timing,
                ..ExperimentConfig::new(ground.n, ground.regime.regime()?, trials, Seed(seed))
            };
            let (records, summary) = run_experiment(&config)?;
            let json_path = csv_path.with_extension("json");
            let mut csv = BufWriter::new(File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?);
            let mut json = BufWriter::new(File::create(&json_path).with_context(|| format!("creating {}", json_path.display()))?);
            write_outputs(&config, &records, &summary, &mut csv, &mut json)?;
            csv.flush()?;
            json.flush()?;
            writeln!(out, "wrote {} and {}", csv_path.display(), json_path.display())?;
        }
    }
    Ok(())
}
