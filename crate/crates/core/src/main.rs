//! Thin CLI over the library: data generation, the prefix-sum experiment,
//! randomized bound verification, the closed-form bound table, and the
//! Monte-Carlo estimators.
//!
//! Exit codes: 0 success, 1 config/usage error, 2 solver failure,
//! 3 bound violation.

use clap::{Args, Parser, Subcommand};
use ksb::bounds::BoundError;
use ksb::config::{ExperimentConfig, SolveMode};
use ksb::runner::{self, RunError, VerifyConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ksb", version, about = "Dual kernel SVM solver and kernel-sum bound toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to the experiment config JSON.
    #[arg(long, default_value = "configs/default-experiment.json")]
    config: PathBuf,
    /// Override the mixture seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the solver mode.
    #[arg(long, value_enum)]
    mode: Option<SolveMode>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig, RunError> {
        let mut cfg = ExperimentConfig::from_file(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.mixture.seed = seed;
        }
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        cfg.out_dir.clone().unwrap_or_else(|| self.out_dir.clone())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the configured Gaussian-mixture dataset as CSV.
    GenData {
        #[command(flatten)]
        common: ConfigArgs,
        /// Output CSV path (defaults to <out-dir>/dataset.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the prefix-sum experiment and emit CSV, SVG, and a JSON report.
    Experiment {
        #[command(flatten)]
        common: ConfigArgs,
    },
    /// Randomized verification sweep over seeded instances.
    Verify {
        #[command(flatten)]
        common: ConfigArgs,
        /// Number of random instances.
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// Sweep seed (independent of the mixture seed).
        #[arg(long, default_value_t = 0x5EED)]
        sweep_seed: u64,
    },
    /// Print the closed-form complexity bound table.
    Bounds {
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Table covers m = 1..=m.
        #[arg(long, default_value_t = 8)]
        m: usize,
        /// Also write the table as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monte-Carlo estimator checks on the configured kernel matrices.
    Rademacher {
        #[command(flatten)]
        common: ConfigArgs,
        /// Override the sample count.
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &RunError) -> ExitCode {
    match err {
        RunError::Config(_) | RunError::Synth(_) | RunError::Io { .. } => ExitCode::from(1),
        RunError::Solve(_) | RunError::Kernel(_) | RunError::Rademacher(_) => ExitCode::from(2),
        RunError::Bound(BoundError::Violation { .. }) => ExitCode::from(3),
        RunError::Bound(_) => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Result<ExitCode, RunError> {
    match cli.command {
        Command::GenData { common, out } => {
            let cfg = common.load()?;
            let path = out.unwrap_or_else(|| common.out_dir(&cfg).join("dataset.csv"));
            let n = runner::run_gen_data(&cfg, &path)?;
            println!("wrote {n} samples to {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { common } => {
            let cfg = common.load()?;
            let out_dir = common.out_dir(&cfg);
            let report = runner::run_experiment(&cfg, &out_dir)?;
            println!(
                "{:<4} {:>16} {:>16} {:>16}",
                "m", "empirical", "curve_sum", "curve_max"
            );
            for row in &report.rows {
                println!(
                    "{:<4} {:>16.8e} {:>16.8e} {:>16.8e}",
                    row.m, row.empirical, row.curve_sum, row.curve_max
                );
            }
            println!(
                "per-kernel quadratic forms within B^2 = {}: {}",
                report.b_squared, report.all_within_b_squared
            );
            for w in &report.warnings {
                println!("warning: {w}");
            }
            println!("max KKT residual: {:.3e}", report.max_kkt_residual);
            println!("outputs in {}", out_dir.display());
            if !report.violations.is_empty() {
                for v in &report.violations {
                    eprintln!("bound violation: {v}");
                }
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { common, instances, sweep_seed } => {
            let cfg = common.load()?;
            let vcfg = VerifyConfig {
                instances,
                seed: sweep_seed,
                mode: cfg.mode,
                c: cfg.c,
                tol: cfg.tol,
                max_sweeps: cfg.max_sweeps,
                mc_samples: cfg.mc_samples,
            };
            let report = runner::run_verify(&vcfg)?;
            let out_dir = common.out_dir(&cfg);
            std::fs::create_dir_all(&out_dir)
                .map_err(|source| RunError::Io { path: out_dir.clone(), source })?;
            let path = out_dir.join("verify.json");
            std::fs::write(&path, serde_json::to_string_pretty(&report).expect("serializable"))
                .map_err(|source| RunError::Io { path: path.clone(), source })?;
            println!(
                "{} instances, {} failed; report in {}",
                report.instances,
                report.failed_instances,
                path.display()
            );
            for entry in report.entries.iter().filter(|e| !e.pass) {
                eprintln!("instance {} (seed {}, n={}, m={}):", entry.index, entry.seed, entry.n, entry.m);
                for c in entry.checks.iter().filter(|c| !c.pass) {
                    eprintln!("  {}: lhs {:.12e} rhs {:.12e} slack {:.3e}", c.name, c.lhs, c.rhs, c.slack);
                }
            }
            if report.all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Command::Bounds { b, r, n, m, csv } => {
            let table = runner::run_bounds(b, r, n, m)?;
            print!("{}", table.format_text());
            if let Some(path) = csv {
                std::fs::write(&path, table.to_csv())
                    .map_err(|source| RunError::Io { path: path.clone(), source })?;
                println!("csv written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Rademacher { common, samples } => {
            let mut cfg = common.load()?;
            if let Some(s) = samples {
                cfg.mc_samples = s;
            }
            let report = runner::run_rademacher(&cfg)?;
            println!(
                "{:<28} {:>14} {:>14} {:>10} {:>6}",
                "check", "estimate", "bound", "slack", "pass"
            );
            for c in &report.kernel {
                println!(
                    "{:<28} {:>14.6e} {:>14.6e} {:>10.3e} {:>6}",
                    c.name, c.lhs, c.rhs, c.slack, c.pass
                );
            }
            if report.all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
    }
}
