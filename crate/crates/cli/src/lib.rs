//! Command-line front end for the `edgegas` library.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{AsymArgs, CheckArgs, ElectroArgs, McArgs};
use config::RunConfig;
use error::CliError;
use output::{table_text, num, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "edgegas", version, about = "Log-gas electrostatics and gap probabilities at random-matrix edges")]
pub struct Cli {
    /// JSON config keyed by flag names (default: $EDGEGAS_CONFIG)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (for `mc`, a prefix for PREFIX.json and PREFIX.csv)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the conditioned electrostatic problem
    Electro(ElectroArgs),
    /// Print large-gap expansion coefficients
    Asym(AsymArgs),
    /// Check the duality or factorization identities
    Check(CheckArgs),
    /// Monte Carlo gap probabilities from tridiagonal ensembles
    Mc(McArgs),
    /// Run the verification suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Run only this group (repeatable)
    #[arg(long)]
    pub group: Vec<String>,
    /// Include the Monte Carlo groups
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl VerifyArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            group: (!self.group.is_empty()).then(|| self.group.clone()),
            full: self.full.then_some(true),
            seed: self.seed,
            ..Default::default()
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = RunConfig::discover(cli.config.as_deref())?;
    let flags = match &cli.command {
        Command::Electro(a) => a.config(),
        Command::Asym(a) => a.config(),
        Command::Check(a) => a.config(),
        Command::Mc(a) => a.config(),
        Command::Verify(a) => a.config(),
    };
    let globals = RunConfig {
        format: cli.format.map(|f| f.name().to_string()),
        out: cli.out.clone(),
        ..Default::default()
    };
    let mut cfg = globals.over(flags).over(file);
    let format: Format = cfg.format.take().as_deref().unwrap_or("json").parse()?;
    let out = cfg.out.take();

    match cli.command {
        Command::Electro(_) => commands::electro(cfg)?.emit(format, out.as_deref()),
        Command::Asym(_) => commands::asym(cfg)?.emit(format, out.as_deref()),
        Command::Check(_) => {
            let (report, passed) = commands::check(cfg)?;
            report.emit(format, out.as_deref())?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Verification(format!("residuals exceed {:e}", commands::CHECK_TOL)))
            }
        }
        Command::Mc(a) => {
            let (report, result) = commands::mc(cfg, a.threads)?;
            match &out {
                Some(prefix) => {
                    let (json, csv) = commands::mc_paths(prefix);
                    std::fs::write(json, report.render(Format::Json)?)?;
                    std::fs::write(csv, report.render(Format::Csv)?)?;
                }
                None => report.emit(format, None)?,
            }
            if result.report.complete {
                Ok(())
            } else {
                Err(CliError::Accuracy(format!(
                    "time budget exhausted after {} of {} samples; partial report written",
                    result.report.samples_completed, result.report.plan.samples
                )))
            }
        }
        Command::Verify(_) => {
            let full = cfg.full == Some(true);
            let seed = cfg.seed.unwrap_or(0);
            let requested = cfg.group.clone().unwrap_or_default();
            let groups = verify::selected_groups(&requested, full);
            let eff = RunConfig {
                group: Some(groups.clone()),
                full: Some(full),
                seed: Some(seed),
                ..cfg
            };
            let suite = verify::run_suite(&groups, seed)?;
            let mut report = Report::new("verify", eff, &suite)?;
            let rows: Vec<Vec<String>> = suite
                .groups
                .iter()
                .map(|g| {
                    vec![
                        g.group.clone(),
                        if g.passed { "PASS" } else { "FAIL" }.to_string(),
                        g.checks.to_string(),
                        num(g.worst_error),
                        num(g.worst_tolerance),
                        format!("{:.2}", g.seconds),
                    ]
                })
                .collect();
            report.text = table_text(&["group", "status", "checks", "worst error", "tolerance", "seconds"], &rows);
            report.csv = output::csv_rows(
                &["group", "passed", "checks", "failures", "worst_error", "worst_tolerance", "seconds"],
                &suite
                    .groups
                    .iter()
                    .map(|g| {
                        vec![
                            g.group.clone(),
                            g.passed.to_string(),
                            g.checks.to_string(),
                            g.failures.to_string(),
                            g.worst_error.to_string(),
                            g.worst_tolerance.to_string(),
                            g.seconds.to_string(),
                        ]
                    })
                    .collect::<Vec<_>>(),
            );
            report.emit(format, out.as_deref())?;
            if suite.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = suite.groups.iter().filter(|g| !g.passed).map(|g| g.group.as_str()).collect();
                Err(CliError::Verification(format!("failed groups: {}", failed.join(", "))))
            }
        }
    }
}
