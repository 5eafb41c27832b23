//! Command-line front end: `run`, `validate` and `sweep`.
//!
//! Exit codes: 0 when every asserted check passes, 1 on a failed check or a
//! numerical error, 2 on schema, usage or I/O errors.

pub mod run;
pub mod scenario;
pub mod seeds;
pub mod sweep;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dpisat_core::divergences::Family;

use scenario::{Overrides, ToleranceOverrides};
use seeds::SeedMap;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "dpisat", version, about = "Data-processing saturation checks for quantum divergences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every scenario in a file and write one JSON report per scenario.
    Run {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Accept parameters outside the data-processing regions.
        #[arg(long)]
        allow_non_dpi: bool,
        #[arg(long, value_name = "X")]
        tol_gap: Option<f64>,
        #[arg(long, value_name = "X")]
        tol_residual: Option<f64>,
    },
    /// Check a scenario file without running it.
    Validate { file: PathBuf },
    /// Evaluate gap and residuals across a parameter grid and write CSV.
    Sweep {
        /// relative_entropy, fidelity, sandwiched_renyi, alpha_z or f_divergence (power exponent).
        #[arg(long)]
        measure: String,
        /// JSON file with `channel`, `rho` and `sigma`.
        #[arg(long)]
        fixture: PathBuf,
        /// e.g. "alpha=0.5:3:0.25;z=1,2"
        #[arg(long, default_value = "")]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        allow_non_dpi: bool,
    },
}

fn read(path: &Path) -> Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_SCHEMA
    })
}

fn seeds() -> Result<SeedMap, i32> {
    SeedMap::from_env().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_SCHEMA
    })
}

fn cmd_run(file: &Path, out: &Path, overrides: Overrides) -> Result<i32, i32> {
    let text = read(file)?;
    let scenarios = scenario::load(&text, &seeds()?, &overrides).map_err(|e| {
        eprintln!("schema error in {}: {e}", file.display());
        EXIT_SCHEMA
    })?;
    let reports = run::run_all(&scenarios);
    run::write_reports(out, &reports).map_err(|e| {
        eprintln!("error: writing reports to {}: {e}", out.display());
        EXIT_SCHEMA
    })?;
    for r in &reports {
        println!("{}", run::summary_line(r));
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} scenario(s), {failed} failed", reports.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_validate(file: &Path) -> Result<i32, i32> {
    let text = read(file)?;
    match scenario::load(&text, &seeds()?, &Overrides::default()) {
        Ok(s) => {
            println!("{}: {} valid scenario(s)", file.display(), s.len());
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("schema error in {}: {e}", file.display());
            Ok(EXIT_SCHEMA)
        }
    }
}

fn cmd_sweep(measure: &str, fixture: &Path, grid: &str, out: &Path, allow_non_dpi: bool) -> Result<i32, i32> {
    let usage = |m: String| {
        eprintln!("error: {m}");
        EXIT_SCHEMA
    };
    let family: Family = measure.parse().map_err(|e| usage(format!("--measure: {e}")))?;
    let grid = sweep::parse_grid(grid).map_err(|e| usage(format!("--grid: {e}")))?;
    let fixture_text = read(fixture)?;
    let fixture = scenario::load_fixture(&fixture_text, &seeds()?)
        .map_err(|e| usage(format!("schema error in {}: {e}", fixture.display())))?;
    let result = match sweep::sweep(family, &grid, &fixture, allow_non_dpi) {
        Ok(r) => r,
        Err(sweep::SweepError::Usage(m)) => return Err(usage(m)),
        Err(sweep::SweepError::Numerical(m)) => {
            eprintln!("numerical error: {m}");
            return Ok(EXIT_FAILED);
        }
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    sweep::write_csv(out, &result).map_err(|e| usage(format!("writing {}: {e}", out.display())))?;
    println!("{} row(s) written to {}", result.rows.len(), out.display());
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_SCHEMA } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Run {
            file,
            out,
            allow_non_dpi,
            tol_gap,
            tol_residual,
        } => cmd_run(
            &file,
            &out,
            Overrides {
                allow_non_dpi,
                tolerances: ToleranceOverrides {
                    gap_tol: tol_gap,
                    residual_tol: tol_residual,
                },
            },
        ),
        Command::Validate { file } => cmd_validate(&file),
        Command::Sweep {
            measure,
            fixture,
            grid,
            out,
            allow_non_dpi,
        } => cmd_sweep(&measure, &fixture, &grid, &out, allow_non_dpi),
    };
    result.unwrap_or_else(|code| code)
}
