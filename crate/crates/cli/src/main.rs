//! `moyal-kms`: evaluate and check thermal functionals on the deformed field algebra.
//!
//! Exit status: 0 when every hard identity holds (exploratory results never fail),
//! 1 when a hard identity fails, 2 on invalid input or evaluation errors.

mod commands;
mod config;
mod polyspec;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use crate::report::Status;

#[derive(Parser)]
#[command(name = "moyal-kms", version, about = "Thermal functionals on the Moyal-deformed free field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the JSON report and CSV table.
    #[arg(long, default_value = "reports")]
    out: PathBuf,
    /// Overrides `seed` in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the functional on the polynomial named in `[npoint]`.
    Npoint {
        #[command(flatten)]
        common: Common,
    },
    /// Check KMS, positivity, hermiticity, covariance or the exchange phase.
    Verify {
        #[command(flatten)]
        common: Common,
        /// One of kms, gram, hermiticity, covariance, exchange.
        #[arg(long)]
        check: String,
        /// Overrides the tolerance of the selected check.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compare against the finite-mode Fock-space oracle.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// One of twisted-ccr, warp-homomorphism, gibbs-vs-closed-form, araki-woods, vacuum-limit.
        #[arg(long)]
        check: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Tabulate the sampled Lorentz orbit of theta.
    Orbit {
        #[command(flatten)]
        common: Common,
    },
}

fn apply_tol(cfg: &mut config::RunConfig, check: &str, tol: Option<f64>) -> Result<()> {
    let Some(t) = tol else { return Ok(()) };
    if !(t > 0.0) {
        bail!("--tol must be positive");
    }
    let slot = &mut cfg.tolerances;
    match check {
        "kms" => slot.kms = t,
        "gram" => slot.gram = t,
        "hermiticity" => slot.hermiticity = t,
        "covariance" => slot.covariance = t,
        "exchange" => slot.exchange = t,
        "twisted-ccr" => slot.twisted_ccr = t,
        "warp-homomorphism" => {
            slot.warp = t;
            slot.rieffel_trace = t;
        }
        "gibbs-vs-closed-form" => slot.gibbs = t,
        "araki-woods" => slot.araki_woods = t,
        "vacuum-limit" => slot.vacuum = t,
        other => bail!("unknown check {other:?}"),
    }
    Ok(())
}

fn load(common: &Common) -> Result<config::Loaded> {
    let mut l = config::load(&common.config)?;
    if let Some(s) = common.seed {
        l.config.seed = s;
    }
    Ok(l)
}

fn run(cli: Cli) -> Result<Status> {
    let (out, (rep, table)) = match cli.command {
        Command::Npoint { common } => {
            let l = load(&common)?;
            (common.out, commands::npoint(&l)?)
        }
        Command::Verify { common, check, tol } => {
            let mut l = load(&common)?;
            if !commands::VERIFY_CHECKS.contains(&check.as_str()) {
                bail!("unknown verify check {check:?}; expected one of {:?}", commands::VERIFY_CHECKS);
            }
            apply_tol(&mut l.config, &check, tol)?;
            (common.out, commands::verify(&l, &check)?)
        }
        Command::Oracle { common, check, tol } => {
            let mut l = load(&common)?;
            if !commands::ORACLE_CHECKS.contains(&check.as_str()) {
                bail!("unknown oracle check {check:?}; expected one of {:?}", commands::ORACLE_CHECKS);
            }
            apply_tol(&mut l.config, &check, tol)?;
            (common.out, commands::oracle(&l, &check)?)
        }
        Command::Orbit { common } => {
            let l = load(&common)?;
            (common.out, commands::orbit(&l)?)
        }
    };
    let (json, _) = rep.write(&out, &table)?;
    println!("{}: {}", json.display(), rep.verdict);
    Ok(rep.status)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Pass | Status::Exploratory) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
