mod commands;
mod config;
mod failure;
mod oracle;
mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::failure::Failure;
use crate::report::Record;
use crate::suites::Suite;

#[derive(Parser)]
#[command(
    name = "polyaxial",
    version,
    about = "Bessel-operator transforms, Sobolev norms and spectral solves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Forward transform with Plancherel and inversion checks.
    Transform(Common),
    /// `E^{s,p}` norm of the configured function and the delta table.
    Norm(Common),
    /// Spectral solve of `P(-D_a) u = f`.
    Solve(Common),
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Rebuild the expectation table before verifying.
        #[arg(long)]
        regen_oracle: bool,
    },
}

struct Finished {
    records: Vec<Record>,
    numerical: bool,
}

fn run(cli: Cli) -> Result<Finished, Failure> {
    let common = match &cli.command {
        Command::Transform(c) | Command::Norm(c) | Command::Solve(c) => c,
        Command::Verify { common, .. } => common,
    };
    let cfg = RunConfig::load(&common.config)?;
    let out = common.out.clone().or_else(|| cfg.output.path.clone());
    let format = common.format.unwrap_or(cfg.output.format);

    let finished = match &cli.command {
        Command::Verify {
            suite, regen_oracle, ..
        } => {
            let table = if *regen_oracle {
                let table = oracle::generate(&cfg)?;
                let path = cfg.oracle.clone().unwrap_or_else(oracle::default_path);
                oracle::save(&table, &path)?;
                log::info!("wrote {}", path.display());
                Some(table)
            } else {
                oracle::load(&cfg)?
            };
            let ctx = suites::Ctx::new(cfg, table)?;
            let outcome = suites::run(&ctx, *suite);
            Finished {
                records: outcome.records,
                numerical: outcome.numerical,
            }
        }
        cmd => {
            let output = match cmd {
                Command::Transform(_) => commands::transform(&cfg)?,
                Command::Norm(_) => commands::norm(&cfg)?,
                _ => commands::solve(&cfg)?,
            };
            if let (Some(snap), Some(path)) = (&output.samples, commands::samples_path(&cfg, out.as_deref())) {
                commands::write_samples(snap, &path)?;
            }
            Finished {
                records: output.records,
                numerical: false,
            }
        }
    };
    report::emit(&finished.records, format, out.as_deref().map(Path::new))?;
    Ok(finished)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(f) if f.numerical => ExitCode::from(3),
        Ok(f) => {
            for r in f.records.iter().filter(|r| !r.pass) {
                eprintln!(
                    "FAIL {}: lhs = {:e}, rhs = {:e}, tolerance = {:e}",
                    r.check_id, r.lhs, r.rhs, r.tolerance
                );
            }
            if f.records.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
