//! `qcap`: figure data and verification runs for the placement and two-level channels.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qcap::verify::{self, Suite, Tolerances};
use qcap::{constants_for, UnitMode};

use figures::{ContourArgs, EvolveArgs, FigGaussianArgs, FigTwoLevelArgs};
use output::{emit, Format, Sidecar, Table};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "qcap", version, about = "Capacity of quantum particle-placement and two-level channels")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Serialize)]
struct Common {
    /// Unit system; defaults depend on the subcommand.
    #[arg(long, global = true)]
    units: Option<UnitMode>,
    /// Output file; a `<stem>.meta.json` sidecar is written next to it. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for randomized verification sweeps.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Capacity versus preparation variance for several P / v* ratios.
    FigGaussian(FigGaussianArgs),
    /// Two-level capacity over one period for several gamma = delta / epsilon.
    FigTwoLevel(FigTwoLevelArgs),
    /// Capacity at the optimal precision over a mass / delay grid (SI).
    Contour(ContourArgs),
    /// Densities (gaussian) or level populations (two-level) at given delays.
    Evolve(EvolveArgs),
    /// Run the oracle-equivalence and invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    /// gaussian, two_level, infotheory or all.
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Random draws per check.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Override a check tolerance, e.g. `--tolerance two_level.row_sums=1e-10`.
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
}

impl From<qcap::Error> for Failure {
    fn from(e: qcap::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
    }
}

fn write_table<P: Serialize>(
    common: &Common,
    subcommand: &'static str,
    units: UnitMode,
    parameters: &P,
    table: &Table,
) -> Result<(), Failure> {
    let meta = Sidecar {
        tool: "qcap",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        units,
        format: common.format,
        seed: common.seed,
        parameters,
        columns: &table.columns,
        rows: table.rows.len(),
    };
    emit(common.out.as_deref(), &table.render(common.format), Some(&meta))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let common = &cli.common;
    match &cli.command {
        Command::FigGaussian(args) => {
            let units = common.units.unwrap_or(UnitMode::Natural);
            let table = figures::fig_gaussian(args, &constants_for(units))?;
            write_table(common, "fig-gaussian", units, args, &table)
        }
        Command::FigTwoLevel(args) => {
            let units = common.units.unwrap_or(UnitMode::Natural);
            figures::require_mode(units, UnitMode::Natural, "fig-two-level")?;
            let table = figures::fig_two_level(args, &constants_for(units))?;
            write_table(common, "fig-two-level", units, args, &table)
        }
        Command::Contour(args) => {
            let units = common.units.unwrap_or(UnitMode::Si);
            figures::require_mode(units, UnitMode::Si, "contour")?;
            let table = figures::contour(args, &constants_for(units))?;
            write_table(common, "contour", units, args, &table)
        }
        Command::Evolve(args) => {
            let units = common.units.unwrap_or(UnitMode::Natural);
            let table = figures::evolve(args, &constants_for(units))?;
            write_table(common, "evolve", units, args, &table)
        }
        Command::Verify(args) => run_verify(common, args),
    }
}

fn run_verify(common: &Common, args: &VerifyArgs) -> Result<(), Failure> {
    let units = common.units.unwrap_or(UnitMode::Natural);
    figures::require_mode(units, UnitMode::Natural, "verify")?;
    let mut tol = Tolerances::default();
    for spec in &args.tolerances {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("tolerance `{spec}` is not NAME=VALUE")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Failure::Usage(format!("tolerance `{spec}` has a non-numeric value")))?;
        tol.set(name, value)?;
    }
    let report = verify::run(args.suite, common.seed, args.trials as usize, &tol)?;

    for c in &report.checks {
        eprintln!(
            "[{}] {:<40} max deviation {:.3e} (tolerance {:.0e}, {} trials)",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_deviation,
            c.tolerance,
            c.trials
        );
    }
    if let Some(m) = &report.monotonicity {
        eprintln!(
            "[INFO] capacity non-increasing in r0(1-r0): {}/{} cells monotone (slack {:.0e})",
            m.cells.len() - m.violations,
            m.cells.len(),
            m.slack
        );
    }

    let body = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| Failure::Usage(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("suite,check,trials,max_deviation,tolerance,passed\n");
            for c in &report.checks {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.suite,
                    c.name,
                    c.trials,
                    output::format_number(c.max_deviation),
                    output::format_number(c.tolerance),
                    c.passed
                ));
            }
            s
        }
    };
    #[derive(Serialize)]
    struct VerifyParams<'a> {
        #[serde(flatten)]
        args: &'a VerifyArgs,
        tolerances: &'a Tolerances,
    }
    let params = VerifyParams {
        args,
        tolerances: &tol,
    };
    let columns = ["suite", "check", "trials", "max_deviation", "tolerance", "passed"];
    let meta = Sidecar {
        tool: "qcap",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: "verify",
        units,
        format: common.format,
        seed: common.seed,
        parameters: &params,
        columns: &columns,
        rows: report.checks.len(),
    };
    emit(common.out.as_deref(), &body, Some(&meta))?;

    if report.passed {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(Failure::Verification(names.join(", ")))
    }
}
