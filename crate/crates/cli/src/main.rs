use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use dynsched::experiments::stationary_check;
use dynsched::harness::{
    default_parallelism, output, run_sweep, ExperimentConfig, SweepConfig, SweepResult, THREADS_ENV,
};
use dynsched::oracle::optimal_discrepancy;
use dynsched::{Error, Instance};

/// Dynamic two-machine makespan scheduling experiments.
#[derive(Debug, Parser)]
#[command(name = "dynsched", version, disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment configuration and print the per-trial CSV.
    Run {
        config: PathBuf,
        /// Also write trials.csv, aggregate.csv and traces.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (defaults to $DYNSCHED_THREADS or the CPU count).
        #[arg(long, env = THREADS_ENV)]
        threads: Option<usize>,
    },
    /// Run a configuration over a grid of n and print the aggregate CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = THREADS_ENV)]
        threads: Option<usize>,
    },
    /// Print the optimal discrepancy of an instance.
    Oracle { instance: PathBuf },
    /// Compare burnt-in job sizes with the stationary distribution; prints the TV distance.
    StationaryCheck {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        samples: usize,
        /// Walk steps per job (defaults to 4 n^2).
        #[arg(long)]
        burn: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the version.
    Version,
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::InvalidInstance(_)
            | Error::InvalidAssignment(_)
            | Error::LengthMismatch { .. } => Failure::Config(e.into()),
            _ => Failure::Runtime(e.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, out, threads } => {
            let cfg = ExperimentConfig::load(&config)?;
            let result = run_sweep(std::slice::from_ref(&cfg), threads_or_default(threads), 1000)?;
            print!("{}", output::trials_csv(&result.records));
            if let Some(dir) = out {
                write_outputs(&dir, &result)?;
            }
        }
        Command::Sweep { config, out, threads } => {
            let sweep = SweepConfig::load(&config)?;
            let result = run_sweep(&sweep.configs(), threads_or_default(threads), sweep.bootstrap_reps)?;
            print!("{}", output::aggregate_csv(&result.aggregates));
            for f in &result.fits {
                eprintln!(
                    "fit {}: exponent {} coefficient {}",
                    f.target,
                    output::fmt_real(f.fit.exponent),
                    output::fmt_real(f.fit.coefficient)
                );
            }
            if let Some(dir) = out {
                write_outputs(&dir, &result)?;
            }
        }
        Command::Oracle { instance } => {
            let text = std::fs::read_to_string(&instance)
                .with_context(|| format!("cannot read {}", instance.display()))
                .map_err(Failure::Config)?;
            let inst = Instance::from_json(&text)?;
            println!("{}", optimal_discrepancy(&inst)?);
        }
        Command::StationaryCheck { n, samples, burn, seed } => {
            if n < 2 || samples == 0 {
                return Err(Failure::Config(anyhow::anyhow!("need --n >= 2 and --samples >= 1")));
            }
            let burn = burn.unwrap_or(4 * n * n);
            let check = stationary_check(n, samples, burn, seed)?;
            println!("{}", output::fmt_real(check.tv));
        }
        Command::Version => println!("dynsched {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn threads_or_default(threads: Option<usize>) -> usize {
    threads.filter(|&t| t > 0).unwrap_or_else(default_parallelism)
}

fn write_outputs(dir: &Path, result: &SweepResult) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("trials.csv"), output::trials_csv(&result.records))?;
    std::fs::write(dir.join("aggregate.csv"), output::aggregate_csv(&result.aggregates))?;
    std::fs::write(dir.join("fits.csv"), output::fits_csv(&result.fits))?;
    if result.records.iter().any(|r| !r.trace.is_empty()) {
        std::fs::write(dir.join("traces.csv"), output::trace_csv(&result.records))?;
    }
    Ok(())
}
